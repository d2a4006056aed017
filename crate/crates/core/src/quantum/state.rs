use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{check_domain, Error, Result};
use crate::matrix::{hermitian_eigenvalues, ComplexMatrix};

use super::settings::THETA_MIN;

/// Accepted deviation of `Tr ρ` from one.
pub const STATE_TRACE_TOL: f64 = 1e-8;
/// Accepted negativity of the smallest eigenvalue of a state.
pub const STATE_PSD_TOL: f64 = 1e-9;

/// Normalized pure state on one, two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !matches!(amplitudes.len(), 2 | 4 | 8) {
            return Err(Error::UnsupportedDimension(amplitudes.len()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization { trace: norm * norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes).expect("dimension validated on construction")
    }

    /// `U|ψ⟩` for a unitary `U`; the norm is rechecked.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        let n = self.dim();
        if u.dim() != n {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: n,
            });
        }
        let out = (0..n)
            .map(|i| (0..n).map(|j| u[(i, j)] * self.amplitudes[j]).sum())
            .collect();
        Self::new(out)
    }
}

/// `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> PureState {
    PureState::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
}

/// Which outcome of a two-outcome instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Zero,
    One,
}

impl Branch {
    pub fn index(self) -> usize {
        match self {
            Branch::Zero => 0,
            Branch::One => 1,
        }
    }
}

/// `|φ_θ^0⟩ = cos θ|00⟩ + sin θ|11⟩`, `|φ_θ^1⟩ = sin θ|00⟩ + cos θ|11⟩`.
pub fn partial_entangled_state(theta: f64, branch: Branch) -> Result<PureState> {
    check_domain("theta", theta, THETA_MIN, FRAC_PI_4)?;
    Ok(schmidt_state(theta, branch))
}

pub(crate) fn schmidt_state(theta: f64, branch: Branch) -> PureState {
    let (s, c) = theta.sin_cos();
    let amps = match branch {
        Branch::Zero => [c, 0.0, 0.0, s],
        Branch::One => [s, 0.0, 0.0, c],
    };
    PureState::from_real(&amps).unwrap()
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.hermiticity_defect();
        if deviation > 1e-9 {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::Normalization { trace });
        }
        let min = hermitian_eigenvalues(&m)?[0];
        if min < -STATE_PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Normalizes a PSD operator by its trace first.
    pub fn from_unnormalized(m: ComplexMatrix) -> Result<Self> {
        let trace = m.trace().re;
        if trace <= 0.0 {
            return Err(Error::Normalization { trace });
        }
        Self::new(m.scale(1.0 / trace))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(dim)?.scale(1.0 / dim as f64)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `Tr(ρ O)` for a Hermitian observable.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        self.0.trace_product(observable).re
    }
}
