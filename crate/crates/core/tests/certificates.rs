use std::f64::consts::FRAC_PI_4;

use diqc_core::certify::{find_cutoff, GridSpec, LinearBoundCertificate, SolverConfig};
use diqc_core::experiment::{end_to_end, simulate_run};
use diqc_core::quantum::resolve_delta_variant;
use diqc_core::quantum::{b_theta_new, DeltaVariant};
use diqc_core::{Error, FidelityCertificate, Inequality, NoiseModel};

fn quick() -> SolverConfig {
    SolverConfig {
        grid: GridSpec {
            n_a: 101,
            n_b: 101,
            refine_levels: 1,
            refine_n: 11,
        },
        ..SolverConfig::default()
    }
}

#[test]
fn certificate_survives_json() {
    let cert = find_cutoff(0.45, Inequality::Tilted, &quick()).unwrap();
    let text = serde_json::to_string(&cert).unwrap();
    let back: LinearBoundCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);

    let fid = end_to_end(&NoiseModel::ideal(0.45), 0.45, &cert).unwrap();
    let back: FidelityCertificate =
        serde_json::from_str(&serde_json::to_string(&fid).unwrap()).unwrap();
    assert_eq!(back, fid);
}

#[test]
fn certificate_records_its_inputs() {
    let config = quick();
    let cert = find_cutoff(0.6, Inequality::New, &config).unwrap();
    assert_eq!(cert.grid, config.grid);
    assert_eq!(cert.tol, config.tol);
    assert_eq!(cert.delta_variant, DeltaVariant::Logarithmic);
    assert!(cert.points_checked > 101 * 101);
    assert!(cert.i_star > cert.local_bound && cert.i_star < 1.0);
    assert!(cert.worst_margin >= -cert.tol);
}

#[test]
fn solver_is_deterministic() {
    let a = find_cutoff(0.3, Inequality::New, &quick()).unwrap();
    let b = find_cutoff(0.3, Inequality::New, &quick()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn printed_offset_is_replaced() {
    // The printed offset does not make Bob's channel the identity at b_θ.
    for theta in [0.3, 0.6, FRAC_PI_4 - 0.01] {
        assert_eq!(
            resolve_delta_variant(b_theta_new(theta)),
            DeltaVariant::Logarithmic
        );
    }
}

#[test]
fn small_angles_are_out_of_reach() {
    match find_cutoff(0.05, Inequality::New, &quick()) {
        Err(Error::ChannelFamilyInvalid { margin, .. }) => assert!(margin < -1e-3),
        other => panic!("expected infeasibility, got {other:?}"),
    }
}

#[test]
fn noise_lowers_the_bound() {
    let theta = 0.6;
    let cert = find_cutoff(theta, Inequality::New, &quick()).unwrap();
    let bound = |noise: NoiseModel| end_to_end(&noise, theta, &cert).unwrap().bound;
    let ideal = NoiseModel::ideal(theta);
    let mut previous = bound(ideal);
    for v in [0.99, 0.97, 0.95, 0.9] {
        let b = bound(NoiseModel {
            visibility: v,
            ..ideal
        });
        assert!(b <= previous + 1e-12);
        previous = b;
    }
    let mut previous = bound(ideal);
    for eta in [0.01, 0.03, 0.06, 0.1] {
        let b = bound(NoiseModel {
            branch_depolarization: eta,
            ..ideal
        });
        assert!(b <= previous + 1e-12);
        previous = b;
    }
    let stats = simulate_run(
        &NoiseModel {
            visibility: 0.9,
            ..ideal
        },
        theta,
    )
    .unwrap();
    assert!((stats.p0 - 0.5).abs() < 1e-12);
}
