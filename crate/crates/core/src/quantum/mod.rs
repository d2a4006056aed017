//! Quantum objects: states, observables, instruments and extraction channels.

pub mod channel;
pub mod instrument;
pub mod settings;
pub mod state;

pub use channel::{
    apply_local_pair, apply_one_sided, apply_one_sided_operator, bob_angle_map, choi_matrix,
    dephasing_alice, dephasing_bob, dephasing_weight, resolve_delta_variant, DeltaVariant,
    Dephasing, DephasingAxis, KrausChannel, QubitChannel,
};
pub use instrument::{
    apply_instrument, block_fidelity, instrument_choi, lift, reference_instrument, KrausInstrument,
    RegisterBlock, RegisterState,
};
pub use settings::{
    alice_observables, b_theta_new, b_theta_tilted, bob_observables, ideal_bob_angle,
    ideal_settings, Inequality, QubitObservable, Side, THETA_MIN,
};
pub use state::{partial_entangled_state, phi_plus, Branch, DensityMatrix, PureState};

use crate::matrix::{kron, ComplexMatrix};
use num_complex::Complex64;

/// `R = e^{iπσx/2} = iσx`.
pub fn x_rotation_pi() -> ComplexMatrix {
    crate::matrix::pauli::x().scale_complex(Complex64::new(0.0, 1.0))
}

/// `R ⊗ R`.
pub fn double_x_rotation() -> ComplexMatrix {
    let r = x_rotation_pi();
    kron(&r, &r).expect("two qubits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;

    #[test]
    fn rotation_maps_h_to_v() {
        let r = x_rotation_pi();
        // R H R† = −V, and conjugation by ±V is the same map.
        let rotated = pauli::h().conjugate_by(&r);
        assert!(rotated.max_abs_diff(&pauli::v().scale(-1.0)) < 1e-12);
        let rho = pauli::y().scale(0.3);
        let rho = &rho + &pauli::identity().scale(0.5);
        assert!(
            rho.conjugate_by(&rotated)
                .max_abs_diff(&rho.conjugate_by(&pauli::v()))
                < 1e-12
        );
    }

    #[test]
    fn rotation_maps_branch_states() {
        for theta in [0.05, 0.3, 0.6, std::f64::consts::FRAC_PI_4] {
            let p0 = partial_entangled_state(theta, Branch::Zero).unwrap();
            let p1 = partial_entangled_state(theta, Branch::One).unwrap();
            let rotated = p0.evolve(&double_x_rotation()).unwrap();
            assert!((rotated.inner(&p1).norm() - 1.0).abs() < 1e-14);
        }
    }
}
