//! Bell expressions: CHSH, the new family `I_θ` and the tilted CHSH.
//!
//! Every expression exists twice: as a function of a [`CorrelatorTable`] and
//! as a 4x4 Bell operator for the parametrized settings. The two are built
//! independently; tests check `Tr(B(a, b) ρ) = value(correlators(ρ, a, b))`.
//!
//! The tilted CHSH is written with Bob's `B_1` outcome negated relative to
//! its textbook form,
//! `(α A_0 + A_0(B_0 − B_1) + A_1(B_0 + B_1)) / sqrt(8 + 2α²)`,
//! so that it pairs Alice's and Bob's observables the same way `I_θ` does.
//! Local and quantum bounds are unaffected by the relabeling.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{kron, pauli, ComplexMatrix};
use crate::quantum::settings::{
    alice_observables, b_theta_new, bob_observables, check_angle, check_theta, Inequality,
};
use crate::quantum::{double_x_rotation, DensityMatrix};

/// Expectation values of the four parametrized observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    /// `joint[k][j] = ⟨A_k B_j⟩`.
    pub joint: [[f64; 2]; 2],
    /// `⟨A_0⟩, ⟨A_1⟩`.
    pub alice: [f64; 2],
    /// `⟨B_0⟩, ⟨B_1⟩`.
    pub bob: [f64; 2],
}

impl CorrelatorTable {
    pub fn zero() -> Self {
        Self {
            joint: [[0.0; 2]; 2],
            alice: [0.0; 2],
            bob: [0.0; 2],
        }
    }

    /// Table of the deterministic strategy `A_k = alice[k]`, `B_j = bob[j]`.
    pub fn deterministic(alice: [i8; 2], bob: [i8; 2]) -> Self {
        let a = alice.map(f64::from);
        let b = bob.map(f64::from);
        Self {
            joint: [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]],
            alice: a,
            bob: b,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.joint
            .iter()
            .flatten()
            .chain(&self.alice)
            .chain(&self.bob)
            .all(|x| (-1.0 - 1e-12..=1.0 + 1e-12).contains(x))
    }

    /// Table after Bob reports the negated outcome of `B_j`.
    pub fn with_bob_negated(&self, j: usize) -> Self {
        let mut out = *self;
        out.bob[j] = -out.bob[j];
        for k in 0..2 {
            out.joint[k][j] = -out.joint[k][j];
        }
        out
    }
}

/// A Bell expression together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "theta", rename_all = "lowercase")]
pub enum BellKind {
    Chsh,
    New(f64),
    Tilted(f64),
}

impl BellKind {
    pub fn from_inequality(inequality: Inequality, theta: f64) -> Self {
        match inequality {
            Inequality::New => BellKind::New(theta),
            Inequality::Tilted => BellKind::Tilted(theta),
        }
    }

    pub fn value(&self, t: &CorrelatorTable) -> Result<f64> {
        match *self {
            BellKind::Chsh => Ok(chsh_value(t)),
            BellKind::New(theta) => new_bell_value(t, theta),
            BellKind::Tilted(theta) => tilted_bell_value(t, theta),
        }
    }

    pub fn operator(&self, a: f64, b: f64) -> Result<ComplexMatrix> {
        match *self {
            BellKind::Chsh => chsh_operator(a, b),
            BellKind::New(theta) => new_bell_operator(theta, a, b),
            BellKind::Tilted(theta) => tilted_operator(theta, a, b),
        }
    }

    /// Closed-form local bound.
    pub fn local_bound(&self) -> Result<f64> {
        match *self {
            BellKind::Chsh => Ok(2.0),
            BellKind::New(theta) => local_bound_new(theta),
            BellKind::Tilted(theta) => local_bound_tilted(theta),
        }
    }
}

/// `β = ⟨A_0B_0⟩ + ⟨A_0B_1⟩ + ⟨A_1B_0⟩ − ⟨A_1B_1⟩`.
pub fn chsh_value(t: &CorrelatorTable) -> f64 {
    t.joint[0][0] + t.joint[0][1] + t.joint[1][0] - t.joint[1][1]
}

/// `I_θ` evaluated on a correlator table.
pub fn new_bell_value(t: &CorrelatorTable, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let bt = b_theta_new(theta);
    let (sb, cb) = bt.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let j = &t.joint;
    Ok(0.25
        * ((j[0][0] - j[0][1]) / sb
            + (s2 / cb) * (j[1][0] + j[1][1])
            + c2 * (t.alice[0] + (t.bob[0] - t.bob[1]) / (2.0 * sb))))
}

/// `α_θ = 2 / sqrt(1 + 2 tan² 2θ)`, with the limit 0 at θ = π/4.
pub fn tilted_alpha(theta: f64) -> f64 {
    if (theta - FRAC_PI_4).abs() < 1e-12 {
        return 0.0;
    }
    let t = (2.0 * theta).tan();
    2.0 / (1.0 + 2.0 * t * t).sqrt()
}

/// Normalized tilted CHSH on a correlator table (Bob's `B_1` relabeled, see module docs).
pub fn tilted_bell_value(t: &CorrelatorTable, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let alpha = tilted_alpha(theta);
    let j = &t.joint;
    let raw = alpha * t.alice[0] + (j[0][0] - j[0][1]) + (j[1][0] + j[1][1]);
    Ok(raw / (8.0 + 2.0 * alpha * alpha).sqrt())
}

fn check_settings(a: f64, b: f64) -> Result<()> {
    check_angle("a", a)?;
    check_angle("b", b)
}

/// Bell operator of `I_θ` at settings `A(a)`, `B(b)`.
pub fn new_bell_operator(theta: f64, a: f64, b: f64) -> Result<ComplexMatrix> {
    check_theta(theta)?;
    check_settings(a, b)?;
    let bt = b_theta_new(theta);
    let (sb, cb) = bt.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let [a0, a1] = alice_observables(a);
    let [b0, b1] = bob_observables(b);
    let id = pauli::identity();
    let diff = &b0 - &b1;
    let sum = &b0 + &b1;
    let terms = [
        kron(&a0, &diff)?.scale(1.0 / sb),
        kron(&a1, &sum)?.scale(s2 / cb),
        kron(&a0, &id)?.scale(c2),
        kron(&id, &diff)?.scale(c2 / (2.0 * sb)),
    ];
    let total = terms
        .iter()
        .fold(ComplexMatrix::zeros(4)?, |acc, t| &acc + t);
    Ok(total.scale(0.25))
}

/// Bell operator of the (relabeled) tilted CHSH at settings `A(a)`, `B(b)`.
pub fn tilted_operator(theta: f64, a: f64, b: f64) -> Result<ComplexMatrix> {
    check_theta(theta)?;
    check_settings(a, b)?;
    let alpha = tilted_alpha(theta);
    let [a0, a1] = alice_observables(a);
    let [b0, b1] = bob_observables(b);
    let id = pauli::identity();
    let total =
        &(&kron(&a0, &id)?.scale(alpha) + &kron(&a0, &(&b0 - &b1))?) + &kron(&a1, &(&b0 + &b1))?;
    Ok(total.scale(1.0 / (8.0 + 2.0 * alpha * alpha).sqrt()))
}

/// CHSH operator `A_0(B_0+B_1) + A_1(B_0−B_1)` at settings `A(a)`, `B(b)`.
pub fn chsh_operator(a: f64, b: f64) -> Result<ComplexMatrix> {
    check_settings(a, b)?;
    let [a0, a1] = alice_observables(a);
    let [b0, b1] = bob_observables(b);
    Ok(&kron(&a0, &(&b0 + &b1))? + &kron(&a1, &(&b0 - &b1))?)
}

/// `¼[cos 2θ + (2 + cos 2θ) sqrt((7 − cos 4θ)/(5 + cos 4θ))]`.
pub fn local_bound_new(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let c2 = (2.0 * theta).cos();
    let c4 = (4.0 * theta).cos();
    Ok(0.25 * (c2 + (2.0 + c2) * ((7.0 - c4) / (5.0 + c4)).sqrt()))
}

/// `(2 + α_θ) / sqrt(8 + 2α_θ²)`.
pub fn local_bound_tilted(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let alpha = tilted_alpha(theta);
    Ok((2.0 + alpha) / (8.0 + 2.0 * alpha * alpha).sqrt())
}

/// A deterministic local strategy `(A_0, A_1, B_0, B_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [i8; 2],
    pub bob: [i8; 2],
}

impl DeterministicStrategy {
    /// All 16 assignments in a fixed order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..16).map(|bits| {
            let pick = |k: u8| if bits >> k & 1 == 0 { 1 } else { -1 };
            Self {
                alice: [pick(3), pick(2)],
                bob: [pick(1), pick(0)],
            }
        })
    }

    pub fn table(&self) -> CorrelatorTable {
        CorrelatorTable::deterministic(self.alice, self.bob)
    }
}

/// Maximum over the vertices of the local polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimum {
    pub value: f64,
    /// Every vertex attaining `value` within `1e-12`.
    pub maximizers: Vec<DeterministicStrategy>,
}

/// Maximizes the expression over all 16 deterministic strategies.
pub fn brute_force_local_bound(kind: &BellKind) -> Result<LocalOptimum> {
    let scored = DeterministicStrategy::all()
        .map(|s| Ok((s, kind.value(&s.table())?)))
        .collect::<Result<Vec<_>>>()?;
    let value = scored
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers = scored
        .into_iter()
        .filter(|(_, v)| value - v <= 1e-12)
        .map(|(s, _)| s)
        .collect();
    Ok(LocalOptimum { value, maximizers })
}

/// Born-rule correlators of `ρ` for the parametrized settings.
pub fn correlators_from_state(rho: &DensityMatrix, a: f64, b: f64) -> Result<CorrelatorTable> {
    check_settings(a, b)?;
    if rho.dim() != 4 {
        return Err(crate::Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let alice = alice_observables(a);
    let bob = bob_observables(b);
    let id = pauli::identity();
    let mut t = CorrelatorTable::zero();
    for k in 0..2 {
        for (j, bj) in bob.iter().enumerate() {
            t.joint[k][j] = rho.expectation(&kron(&alice[k], bj)?);
        }
        t.alice[k] = rho.expectation(&kron(&alice[k], &id)?);
        t.bob[k] = rho.expectation(&kron(&id, &bob[k])?);
    }
    Ok(t)
}

/// Post-processing of the outcome-1 data: Alice negates `A_0`, Bob swaps `B_0` and `B_1`.
///
/// Evaluating an expression on the relabeled table equals evaluating the
/// rotated operator `(R⊗R) B(π/2 − a, b) (R⊗R)†` on the raw data.
pub fn relabel_branch1(t: &CorrelatorTable) -> CorrelatorTable {
    CorrelatorTable {
        joint: [
            [-t.joint[0][1], -t.joint[0][0]],
            [t.joint[1][1], t.joint[1][0]],
        ],
        alice: [-t.alice[0], t.alice[1]],
        bob: [t.bob[1], t.bob[0]],
    }
}

/// `B'(a, b) = (R⊗R) B(π/2 − a, b) (R⊗R)†` with `R = e^{iπσx/2}`.
pub fn branch1_operator(kind: &BellKind, a: f64, b: f64) -> Result<ComplexMatrix> {
    check_settings(a, b)?;
    let mirrored = kind.operator(FRAC_PI_2 - a, b)?;
    Ok(mirrored.conjugate_by(&double_x_rotation()))
}

/// Quantum maximum of CHSH.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;
