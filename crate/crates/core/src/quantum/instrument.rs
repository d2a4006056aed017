//! Two-outcome qubit instruments and their register-valued outputs.

use std::f64::consts::FRAC_PI_4;

use crate::error::{check_domain, Error, Result};
use crate::matrix::{kron, pauli, uhlmann_fidelity, ComplexMatrix};

use super::settings::Side;
use super::state::{phi_plus, DensityMatrix};

/// Tolerance on `Σ K†K = 1`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Outcomes whose probability falls below this carry no conditional state.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

/// Branch maps `M_ℓ[σ] = Σ_m K_{ℓ,m} σ K_{ℓ,m}†` on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausInstrument {
    branches: Vec<Vec<ComplexMatrix>>,
}

impl KrausInstrument {
    pub fn new(branches: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if branches.is_empty() || branches.iter().any(Vec::is_empty) {
            return Err(Error::Construction(
                "every branch needs a Kraus operator".into(),
            ));
        }
        if let Some(k) = branches.iter().flatten().find(|k| k.dim() != 2) {
            return Err(Error::Construction(format!(
                "Kraus operator of dimension {} on a qubit",
                k.dim()
            )));
        }
        let instr = Self { branches };
        let defect = instr.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::Construction(format!(
                "completeness violated by {defect:e}"
            )));
        }
        Ok(instr)
    }

    pub fn branches(&self) -> &[Vec<ComplexMatrix>] {
        &self.branches
    }

    pub fn outcomes(&self) -> usize {
        self.branches.len()
    }

    /// `max |Σ K†K − 1|`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2).unwrap();
        for k in self.branches.iter().flatten() {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&pauli::identity())
    }
}

/// `K̄_0 = cos θ|0⟩⟨0| + sin θ|1⟩⟨1|`, `K̄_1 = sin θ|0⟩⟨0| + cos θ|1⟩⟨1|`.
///
/// Projective σz measurement at θ = 0, identity channel with a random label
/// at θ = π/4.
pub fn reference_instrument(theta: f64) -> Result<KrausInstrument> {
    check_domain("theta", theta, 0.0, FRAC_PI_4)?;
    let (s, c) = theta.sin_cos();
    KrausInstrument::new(vec![
        vec![ComplexMatrix::diag(&[c, s])?],
        vec![ComplexMatrix::diag(&[s, c])?],
    ])
}

/// Embeds a single-qubit operator on `side` of a two-qubit system.
pub fn lift(op: &ComplexMatrix, side: Side) -> ComplexMatrix {
    let id = pauli::identity();
    match side {
        Side::Alice => kron(op, &id),
        Side::Bob => kron(&id, op),
    }
    .expect("qubit operators")
}

/// One classical outcome together with its conditional state.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterBlock {
    pub label: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// `Σ_ℓ p_ℓ ϱ_ℓ ⊗ |ℓ⟩⟨ℓ|`, kept block-wise; the register is never a tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    blocks: Vec<RegisterBlock>,
}

impl RegisterState {
    pub fn new(blocks: Vec<RegisterBlock>) -> Result<Self> {
        let total: f64 = blocks.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > 1e-8 || blocks.iter().any(|b| b.probability < 0.0) {
            return Err(Error::Normalization { trace: total });
        }
        let mut labels: Vec<usize> = blocks.iter().map(|b| b.label).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != blocks.len() {
            return Err(Error::Structural("duplicate register label".into()));
        }
        if blocks
            .windows(2)
            .any(|w| w[0].state.dim() != w[1].state.dim())
        {
            return Err(Error::Structural(
                "register blocks differ in dimension".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[RegisterBlock] {
        &self.blocks
    }

    pub fn block(&self, label: usize) -> Option<&RegisterBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn probability(&self, label: usize) -> f64 {
        self.block(label).map_or(0.0, |b| b.probability)
    }
}

/// Applies the instrument to one qubit of a two-qubit state.
///
/// Outcomes with probability below [`MIN_BRANCH_PROBABILITY`] get
/// probability 0 and a maximally mixed placeholder state.
pub fn apply_instrument(
    instr: &KrausInstrument,
    rho: &DensityMatrix,
    side: Side,
) -> Result<RegisterState> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let mut raw = Vec::with_capacity(instr.outcomes());
    for branch in instr.branches() {
        let mut out = ComplexMatrix::zeros(4)?;
        for k in branch {
            out = &out + &rho.matrix().conjugate_by(&lift(k, side));
        }
        raw.push(out);
    }
    let total: f64 = raw.iter().map(|m| m.trace().re).sum();
    if raw.iter().all(|m| m.trace().re < MIN_BRANCH_PROBABILITY) {
        return Err(Error::DegenerateInstrument);
    }
    let blocks = raw
        .into_iter()
        .enumerate()
        .map(|(label, m)| {
            let p = m.trace().re;
            if p < MIN_BRANCH_PROBABILITY {
                Ok(RegisterBlock {
                    label,
                    probability: 0.0,
                    state: DensityMatrix::maximally_mixed(4)?,
                })
            } else {
                Ok(RegisterBlock {
                    label,
                    probability: p / total,
                    state: DensityMatrix::from_unnormalized(m)?,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    RegisterState::new(blocks)
}

/// Choi state `(id ⊗ M)[|φ⁺⟩⟨φ⁺|]` organized by outcome.
pub fn instrument_choi(instr: &KrausInstrument) -> Result<RegisterState> {
    apply_instrument(instr, &DensityMatrix::from_pure(&phi_plus()), Side::Bob)
}

/// Fidelity of two register states, `Σ_ℓ sqrt(p_ℓ q_ℓ) F(ρ_ℓ, σ_ℓ)`.
pub fn block_fidelity(p: &RegisterState, q: &RegisterState) -> Result<f64> {
    let mut lp: Vec<usize> = p.blocks.iter().map(|b| b.label).collect();
    let mut lq: Vec<usize> = q.blocks.iter().map(|b| b.label).collect();
    lp.sort_unstable();
    lq.sort_unstable();
    if lp != lq {
        return Err(Error::Structural(format!(
            "register labels differ: {lp:?} vs {lq:?}"
        )));
    }
    let mut total = 0.0;
    for bp in &p.blocks {
        let bq = q.block(bp.label).expect("label sets match");
        let weight = (bp.probability * bq.probability).sqrt();
        if weight == 0.0 {
            continue;
        }
        total += weight * uhlmann_fidelity(bp.state.matrix(), bq.state.matrix())?;
    }
    Ok(total.clamp(0.0, 1.0))
}
