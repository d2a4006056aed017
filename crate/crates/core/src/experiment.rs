//! Simulated realization of the three-step recipe.
//!
//! Statistics are exact expectation values. The source is isotropic noise
//! around `|φ⁺⟩`, the instrument is the reference instrument at a possibly
//! wrong angle with Pauli noise inside each branch, and both parties may
//! misalign their settings.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::bell::{correlators_from_state, relabel_branch1, BellKind};
use crate::certify::{certify_instrument, FidelityCertificate, LinearBoundCertificate};
use crate::error::{check_domain, Error, Result};
use crate::matrix::{kron, partial_trace_qubit, pauli, ComplexMatrix};
use crate::quantum::settings::{check_theta, ideal_bob_angle};
use crate::quantum::{
    apply_instrument, block_fidelity, instrument_choi, partial_entangled_state, phi_plus,
    reference_instrument, Branch, DensityMatrix, Inequality, KrausInstrument, PureState, Side,
};

/// Noise parameters of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Weight of `|φ⁺⟩` in the isotropic source.
    pub visibility: f64,
    pub alice_offset: f64,
    pub bob_offset: f64,
    /// Angle of the implemented instrument.
    pub instrument_theta: f64,
    /// Pauli noise weight inside each branch.
    pub branch_depolarization: f64,
}

impl NoiseModel {
    pub fn ideal(theta: f64) -> Self {
        Self {
            visibility: 1.0,
            alice_offset: 0.0,
            bob_offset: 0.0,
            instrument_theta: theta,
            branch_depolarization: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_domain("visibility", self.visibility, 0.0, 1.0)?;
        check_domain("alice_offset", self.alice_offset, -FRAC_PI_4, FRAC_PI_4)?;
        check_domain("bob_offset", self.bob_offset, -FRAC_PI_4, FRAC_PI_4)?;
        check_domain("instrument_theta", self.instrument_theta, 0.0, FRAC_PI_4)?;
        check_domain(
            "branch_depolarization",
            self.branch_depolarization,
            0.0,
            1.0,
        )
    }
}

/// Observed quantities of steps I and II.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub beta: f64,
    pub i0: f64,
    pub i1: f64,
    pub p0: f64,
}

/// `v|φ⁺⟩⟨φ⁺| + (1 − v) 1/4`.
pub fn noisy_source(v: f64) -> Result<DensityMatrix> {
    check_domain("visibility", v, 0.0, 1.0)?;
    let pure = phi_plus().projector().scale(v);
    let mixed = ComplexMatrix::identity(4)?.scale((1.0 - v) / 4.0);
    DensityMatrix::new(&pure + &mixed)
}

/// Branch `ℓ` has Kraus operators `√(1−η) K̄_ℓ`, `√(η/2) σx K̄_ℓ`, `√(η/2) σz K̄_ℓ`.
pub fn noisy_instrument(theta_prime: f64, eta: f64) -> Result<KrausInstrument> {
    check_domain("eta", eta, 0.0, 1.0)?;
    let reference = reference_instrument(theta_prime)?;
    let (x, z) = (pauli::x(), pauli::z());
    let branches = reference
        .branches()
        .iter()
        .map(|ks| {
            let k = &ks[0];
            let mut list = vec![k.scale((1.0 - eta).sqrt())];
            if eta > 0.0 {
                let w = (eta / 2.0).sqrt();
                list.push((&x * k).scale(w));
                list.push((&z * k).scale(w));
            }
            list
        })
        .collect();
    KrausInstrument::new(branches)
}

/// CHSH value of `rho` at `(π/4 + ε_a, π/4 + ε_b)`, with Bob's `B_1` outcome
/// flipped so that the ideal value is `2√2`.
pub fn step_one_chsh(rho: &DensityMatrix, alice_offset: f64, bob_offset: f64) -> Result<f64> {
    let t = correlators_from_state(rho, FRAC_PI_4 + alice_offset, FRAC_PI_4 + bob_offset)?;
    BellKind::Chsh.value(&t.with_bob_negated(1))
}

/// Step II values of `I_θ` on the two conditional states.
fn step_two_values(
    branch0: &DensityMatrix,
    branch1: &DensityMatrix,
    kind: &BellKind,
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    let i0 = kind.value(&correlators_from_state(branch0, a, b)?)?;
    let i1 = kind.value(&relabel_branch1(&correlators_from_state(branch1, a, b)?))?;
    Ok((i0, i1))
}

/// Runs steps I and II for the new inequality.
pub fn simulate_run(noise: &NoiseModel, theta: f64) -> Result<RunStatistics> {
    simulate_run_for(noise, theta, Inequality::New)
}

/// Runs steps I and II, evaluating step II with the given inequality.
pub fn simulate_run_for(
    noise: &NoiseModel,
    theta: f64,
    inequality: Inequality,
) -> Result<RunStatistics> {
    check_theta(theta)?;
    noise.validate()?;
    let source = noisy_source(noise.visibility)?;
    let beta = step_one_chsh(&source, noise.alice_offset, noise.bob_offset)?;

    let instr = noisy_instrument(noise.instrument_theta, noise.branch_depolarization)?;
    let register = apply_instrument(&instr, &source, Side::Bob)?;
    let block = |label: usize| {
        register
            .block(label)
            .filter(|b| b.probability > 0.0)
            .ok_or(Error::DegenerateInstrument)
    };
    let (b0, b1) = (block(0)?, block(1)?);
    let kind = BellKind::from_inequality(inequality, theta);
    let a = FRAC_PI_4 + noise.alice_offset;
    let b = ideal_bob_angle(theta, inequality) + noise.bob_offset;
    let (i0, i1) = step_two_values(&b0.state, &b1.state, &kind, a, b)?;
    Ok(RunStatistics {
        beta,
        i0,
        i1,
        p0: b0.probability,
    })
}

/// Simulates a run and certifies it against `cert`.
pub fn end_to_end(
    noise: &NoiseModel,
    theta: f64,
    cert: &LinearBoundCertificate,
) -> Result<FidelityCertificate> {
    let stats = simulate_run_for(noise, theta, cert.inequality)?;
    certify_instrument(&stats, theta, cert)
}

/// Choi-state fidelity of the implemented instrument with the reference one,
/// with identity extraction maps. This lower-bounds the optimized fidelity.
pub fn oracle_choi_fidelity(noise: &NoiseModel, theta: f64) -> Result<f64> {
    noise.validate()?;
    let actual = instrument_choi(&noisy_instrument(
        noise.instrument_theta,
        noise.branch_depolarization,
    )?)?;
    let reference = instrument_choi(&reference_instrument(theta)?)?;
    block_fidelity(&actual, &reference)
}

/// `(|φ_θ^0⟩|0⟩ + |φ_θ^1⟩|1⟩)/√2` on Alice, Bob and a hidden register qubit.
pub fn cheating_source(theta: f64) -> Result<PureState> {
    let p0 = partial_entangled_state(theta, Branch::Zero)?;
    let p1 = partial_entangled_state(theta, Branch::One)?;
    let mut amps = vec![0.0.into(); 8];
    for k in 0..4 {
        amps[2 * k] = p0.amplitudes()[k] * std::f64::consts::FRAC_1_SQRT_2;
        amps[2 * k + 1] = p1.amplitudes()[k] * std::f64::consts::FRAC_1_SQRT_2;
    }
    PureState::new(amps)
}

/// Statistics of a device that only reads the hidden register.
///
/// Step II sees the target states exactly, but step I sees the mixture of
/// both branches.
pub fn cheating_run(theta: f64, inequality: Inequality) -> Result<RunStatistics> {
    let psi = cheating_source(theta)?;
    let rho = psi.projector();
    let beta = step_one_chsh(
        &DensityMatrix::new(partial_trace_qubit(&rho, 2)?)?,
        0.0,
        0.0,
    )?;

    let mut conditional = Vec::with_capacity(2);
    let mut probs = [0.0; 2];
    for label in 0..2 {
        let mut proj = ComplexMatrix::zeros(2)?;
        proj[(label, label)] = 1.0.into();
        let full = kron(&ComplexMatrix::identity(4)?, &proj)?;
        let reduced = partial_trace_qubit(&rho.conjugate_by(&full), 2)?;
        probs[label] = reduced.trace().re;
        conditional.push(DensityMatrix::from_unnormalized(reduced)?);
    }
    let kind = BellKind::from_inequality(inequality, theta);
    let (i0, i1) = step_two_values(
        &conditional[0],
        &conditional[1],
        &kind,
        FRAC_PI_4,
        ideal_bob_angle(theta, inequality),
    )?;
    Ok(RunStatistics {
        beta,
        i0,
        i1,
        p0: probs[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::TSIRELSON;

    const THETA: f64 = 0.6;

    #[test]
    fn source_endpoints() {
        let pure = noisy_source(1.0).unwrap();
        assert!(pure.matrix().max_abs_diff(&phi_plus().projector()) < 1e-15);
        let mixed = noisy_source(0.0).unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).unwrap().scale(0.25))
                < 1e-15
        );
        for v in [0.0, 0.5, 0.9, 1.0] {
            let beta = step_one_chsh(&noisy_source(v).unwrap(), 0.0, 0.0).unwrap();
            assert!((beta - v * TSIRELSON).abs() < 1e-12);
        }
    }

    #[test]
    fn instrument_reduces_to_reference() {
        let n = noisy_instrument(THETA, 0.0).unwrap();
        assert_eq!(n, reference_instrument(THETA).unwrap());
        let id = noisy_instrument(FRAC_PI_4, 0.0).unwrap();
        for branch in id.branches() {
            let expect = pauli::identity().scale(std::f64::consts::FRAC_1_SQRT_2);
            assert!(branch[0].max_abs_diff(&expect) < 1e-15);
        }
        for (tp, eta) in [(0.1, 0.3), (0.55, 1.0), (0.7, 0.05)] {
            assert!(noisy_instrument(tp, eta).unwrap().completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_run_is_ideal() {
        for theta in [0.2, THETA, FRAC_PI_4] {
            for ineq in [Inequality::New, Inequality::Tilted] {
                let s = simulate_run_for(&NoiseModel::ideal(theta), theta, ineq).unwrap();
                assert!((s.beta - TSIRELSON).abs() < 1e-9);
                assert!((s.i0 - 1.0).abs() < 1e-9, "{theta} {ineq}: {}", s.i0);
                assert!((s.i1 - 1.0).abs() < 1e-9, "{theta} {ineq}: {}", s.i1);
                assert!((s.p0 - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn visibility_scales_beta() {
        let noise = NoiseModel {
            visibility: 0.9,
            ..NoiseModel::ideal(THETA)
        };
        let s = simulate_run(&noise, THETA).unwrap();
        assert!((s.beta - 0.9 * TSIRELSON).abs() < 1e-12);
        assert!((s.beta - 2.5455844).abs() < 1e-6);
    }

    #[test]
    fn runs_are_deterministic() {
        let noise = NoiseModel {
            visibility: 0.95,
            alice_offset: 0.02,
            bob_offset: -0.03,
            instrument_theta: 0.62,
            branch_depolarization: 0.05,
        };
        let a = simulate_run(&noise, THETA).unwrap();
        let b = simulate_run(&noise, THETA).unwrap();
        assert_eq!(a, b);
        assert!(a.p0 > 0.0 && a.p0 < 1.0);
    }

    #[test]
    fn oracle_examples() {
        assert!(
            (oracle_choi_fidelity(&NoiseModel::ideal(THETA), THETA).unwrap() - 1.0).abs() < 1e-9
        );
        let noisy = NoiseModel {
            branch_depolarization: 1.0,
            ..NoiseModel::ideal(THETA)
        };
        assert!(oracle_choi_fidelity(&noisy, THETA).unwrap() < 1.0 - 1e-3);
    }

    #[test]
    fn cheating_source_is_normalized_and_reproduces_targets() {
        let s = cheating_run(0.1, Inequality::New).unwrap();
        assert!((s.i0 - 1.0).abs() < 1e-9);
        assert!((s.i1 - 1.0).abs() < 1e-9);
        assert!((s.p0 - 0.5).abs() < 1e-12);
        let expect = std::f64::consts::SQRT_2 * (1.0 + 0.2f64.sin());
        assert!((s.beta - expect).abs() < 1e-12);
        assert!(s.beta <= 2.0);
    }
}
