//! Device-independent certification of two-outcome qubit instruments.
//!
//! The crate computes self-testing cutoffs for a family of Bell inequalities
//! by checking an operator inequality over all measurement angles, composes
//! state-fidelity certificates into an instrument-fidelity lower bound, and
//! simulates noisy realizations of the three-step recipe to validate the
//! bounds.
//!
//! Module map:
//! - [`matrix`]: dense complex linear algebra (dims 2, 4, 8).
//! - [`quantum`]: states, settings, instruments, extraction channels.
//! - [`bell`]: Bell expressions, operators and local bounds.
//! - [`certify`]: cutoff solver and fidelity composition.
//! - [`experiment`]: simulated noisy runs and the Choi-fidelity oracle.
//! - [`sweep`]: figure-data tables.

pub mod bell;
pub mod certify;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod quantum;
pub mod sweep;

pub use bell::{BellKind, CorrelatorTable};
pub use certify::{
    certify_instrument, find_cutoff, FidelityCertificate, GridSpec, LinearBoundCertificate,
    SolverConfig,
};
pub use error::{Error, Result};
pub use experiment::{NoiseModel, RunStatistics};
pub use matrix::ComplexMatrix;
pub use quantum::{DeltaVariant, DensityMatrix, Inequality, KrausInstrument, RegisterState};
