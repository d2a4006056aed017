//! Cutoff solver and fidelity composition.
//!
//! A cutoff `I*` is certified when, for every measurement angle pair
//! `(a, b)`, the operator
//!
//! ```text
//! (Λ_a ⊗ Λ_b)[|φ_θ^0⟩⟨φ_θ^0|] − s·B(a, b) − μ·1
//! ```
//!
//! is positive semidefinite, with `s = (1 − cos²θ)/(1 − I*)` and
//! `μ = (cos²θ − I*)/(1 − I*)`. Positivity is checked on a finite grid with
//! local refinement, so the certificate is numerical and records the grid it
//! was checked on.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{branch1_operator, BellKind, TSIRELSON};
use crate::error::{check_domain, Error, Result};
use crate::experiment::RunStatistics;
use crate::matrix::{min_eigenvalue, ComplexMatrix};
use crate::quantum::channel::bob_channel_for_ideal_angle;
use crate::quantum::settings::{check_angle, check_theta, ideal_bob_angle, Inequality};
use crate::quantum::state::schmidt_state;
use crate::quantum::{apply_local_pair, dephasing_alice, Branch, DeltaVariant};

/// CHSH value below which the source certificate is trivial: `2(8 + 7√2)/17`.
pub const BETA_STAR: f64 = 2.0 * (8.0 + 7.0 * SQRT_2) / 17.0;

/// Smallest grid resolution accepted by [`find_cutoff`].
pub const MIN_GRID: usize = 101;

/// Offsets of the binary-search bracket from the local bound and from 1.
pub const BRACKET_OFFSET: f64 = 1e-6;

/// Grid over `(a, b) ∈ [0, π/2]²` with local refinement passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_a: usize,
    pub n_b: usize,
    /// Number of refinement passes after the coarse search.
    pub refine_levels: usize,
    /// Points per axis of each refinement patch.
    pub refine_n: usize,
}

impl GridSpec {
    pub fn square(n: usize) -> Self {
        Self {
            n_a: n,
            n_b: n,
            ..Self::default()
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine_levels = 0;
        self
    }

    fn coarse_points(&self) -> Vec<(f64, f64)> {
        let axis = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64)
                .collect()
        };
        let (aa, bb) = (axis(self.n_a), axis(self.n_b));
        aa.iter()
            .flat_map(|&a| bb.iter().map(move |&b| (a, b)))
            .collect()
    }

    fn spacing(&self) -> (f64, f64) {
        (
            FRAC_PI_2 / (self.n_a - 1) as f64,
            FRAC_PI_2 / (self.n_b - 1) as f64,
        )
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_a: 201,
            n_b: 201,
            refine_levels: 2,
            refine_n: 21,
        }
    }
}

/// Parameters of the cutoff search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    /// A margin `≥ −tol` counts as positive semidefinite.
    pub tol: f64,
    /// Final width of the binary-search bracket.
    pub width: f64,
    pub delta: DeltaVariant,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            tol: 1e-9,
            width: 1e-4,
            delta: DeltaVariant::default(),
        }
    }
}

/// A certified linear lower bound on the extracted overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearBoundCertificate {
    pub theta: f64,
    pub inequality: Inequality,
    pub i_star: f64,
    pub slope: f64,
    pub intercept: f64,
    pub local_bound: f64,
    pub grid: GridSpec,
    pub tol: f64,
    /// Smallest eigenvalue found over every checked point.
    pub worst_margin: f64,
    pub worst_point: (f64, f64),
    pub points_checked: usize,
    pub delta_variant: DeltaVariant,
}

impl LinearBoundCertificate {
    pub fn kind(&self) -> BellKind {
        BellKind::from_inequality(self.inequality, self.theta)
    }

    /// `s·I + μ`, the certified overlap at violation `i`.
    pub fn overlap_bound(&self, i: f64) -> f64 {
        self.slope * i + self.intercept
    }
}

/// `(s, μ)` of the line through `(I*, cos²θ)` and `(1, 1)`.
pub fn slope_intercept(theta: f64, i_star: f64) -> (f64, f64) {
    let c2 = theta.cos().powi(2);
    let denom = 1.0 - i_star;
    ((1.0 - c2) / denom, (c2 - i_star) / denom)
}

/// Precomputed operators at one grid point.
struct MarginPoint {
    a: f64,
    b: f64,
    extracted: ComplexMatrix,
    bell: ComplexMatrix,
}

impl MarginPoint {
    fn margin(&self, slope: f64, intercept: f64) -> f64 {
        let mut op = &self.extracted - &self.bell.scale(slope);
        for i in 0..4 {
            op[(i, i)] -= intercept;
        }
        min_eigenvalue(&op).expect("margin operator is Hermitian by construction")
    }
}

/// Builds the operator pair at `(a, b)` for the given target branch.
fn margin_point(
    theta: f64,
    inequality: Inequality,
    delta: DeltaVariant,
    branch: Branch,
    a: f64,
    b: f64,
) -> Result<MarginPoint> {
    let kind = BellKind::from_inequality(inequality, theta);
    let alice = dephasing_alice(a)?;
    let bob = bob_channel_for_ideal_angle(b, ideal_bob_angle(theta, inequality), delta);
    let target = schmidt_state(theta, branch).projector();
    let bell = match branch {
        Branch::Zero => kind.operator(a, b)?,
        Branch::One => branch1_operator(&kind, a, b)?,
    };
    Ok(MarginPoint {
        a,
        b,
        extracted: apply_local_pair(&alice, &bob, &target),
        bell,
    })
}

/// Smallest eigenvalue of `(Λ_a⊗Λ_b)[|φ_θ^0⟩⟨φ_θ^0|] − s·B(a, b) − μ·1`.
///
/// The channels are self-adjoint, so applying them to the projector gives
/// the same operator as their adjoint action.
pub fn operator_margin(
    theta: f64,
    inequality: Inequality,
    i_star: f64,
    a: f64,
    b: f64,
    delta: DeltaVariant,
) -> Result<f64> {
    check_theta(theta)?;
    check_angle("a", a)?;
    check_angle("b", b)?;
    check_domain("i_star", i_star, f64::NEG_INFINITY, 1.0 - f64::EPSILON)?;
    let (s, mu) = slope_intercept(theta, i_star);
    Ok(margin_point(theta, inequality, delta, Branch::Zero, a, b)?.margin(s, mu))
}

/// Same as [`operator_margin`] for the outcome-1 target `|φ_θ^1⟩` and the
/// rotated operator `B'(a, b)`.
pub fn branch1_margin(cert: &LinearBoundCertificate, a: f64, b: f64) -> Result<f64> {
    check_angle("a", a)?;
    check_angle("b", b)?;
    let point = margin_point(
        cert.theta,
        cert.inequality,
        cert.delta_variant,
        Branch::One,
        a,
        b,
    )?;
    Ok(point.margin(cert.slope, cert.intercept))
}

/// Minimum margin and its index; ties go to the lowest index.
fn worst_margin(points: &[MarginPoint], i_star: f64, theta: f64) -> (f64, usize) {
    let (s, mu) = slope_intercept(theta, i_star);
    points
        .par_iter()
        .enumerate()
        .map(|(idx, p)| (p.margin(s, mu), idx))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |x, y| match x.0.total_cmp(&y.0) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Greater => y,
                std::cmp::Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            },
        )
}

fn build_points(
    coords: &[(f64, f64)],
    theta: f64,
    inequality: Inequality,
    delta: DeltaVariant,
    branch: Branch,
) -> Result<Vec<MarginPoint>> {
    coords
        .par_iter()
        .map(|&(a, b)| margin_point(theta, inequality, delta, branch, a, b))
        .collect()
}

/// `n×n` patch of half-width `h` around `(a, b)`, clipped to the domain.
fn patch(center: (f64, f64), half_width: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2);
    let axis = |c: f64, h: f64| -> Vec<f64> {
        (0..n)
            .map(|i| (c - h + 2.0 * h * i as f64 / (n - 1) as f64).clamp(0.0, FRAC_PI_2))
            .collect()
    };
    let aa = axis(center.0, half_width.0);
    let bb = axis(center.1, half_width.1);
    aa.iter()
        .flat_map(|&a| bb.iter().map(move |&b| (a, b)))
        .collect()
}

/// Smallest `I*` (to within `config.width`) for which the operator
/// inequality holds on the grid and on every refinement patch.
pub fn find_cutoff(
    theta: f64,
    inequality: Inequality,
    config: &SolverConfig,
) -> Result<LinearBoundCertificate> {
    check_theta(theta)?;
    let grid = config.grid;
    if grid.n_a < MIN_GRID || grid.n_b < MIN_GRID {
        return Err(Error::Domain {
            name: "grid size",
            value: grid.n_a.min(grid.n_b) as f64,
            min: MIN_GRID as f64,
            max: f64::INFINITY,
        });
    }
    check_domain("tol", config.tol, 0.0, 1.0)?;
    check_domain("width", config.width, f64::MIN_POSITIVE, 1.0)?;

    let kind = BellKind::from_inequality(inequality, theta);
    let local_bound = kind.local_bound()?;
    let bracket_lo = local_bound + BRACKET_OFFSET;
    let bracket_hi = 1.0 - BRACKET_OFFSET;
    let tol = config.tol;

    let mut points = build_points(
        &grid.coarse_points(),
        theta,
        inequality,
        config.delta,
        Branch::Zero,
    )?;
    let feasible = |pts: &[MarginPoint], i: f64| worst_margin(pts, i, theta).0 >= -tol;

    let bisect = |pts: &[MarginPoint], mut lo: f64, mut hi: f64| -> Result<f64> {
        let (m, idx) = worst_margin(pts, hi, theta);
        if m < -tol {
            return Err(Error::ChannelFamilyInvalid {
                i_star: hi,
                margin: m,
                a: pts[idx].a,
                b: pts[idx].b,
            });
        }
        if feasible(pts, lo) {
            return Ok(lo);
        }
        while hi - lo > config.width {
            let mid = 0.5 * (lo + hi);
            if feasible(pts, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    };

    let mut i_star = bisect(&points, bracket_lo, bracket_hi)?;

    let (ha, hb) = grid.spacing();
    let ideal = (FRAC_PI_4, ideal_bob_angle(theta, inequality));
    let shrink = ((grid.refine_n.max(3) - 1) / 2) as f64;
    for level in 0..grid.refine_levels {
        let scale = shrink.powi(level as i32);
        let half = (ha / scale, hb / scale);
        let (_, idx) = worst_margin(&points, i_star, theta);
        let worst = (points[idx].a, points[idx].b);
        let mut coords = patch(worst, half, grid.refine_n);
        coords.extend(patch(ideal, half, grid.refine_n));
        points.extend(build_points(
            &coords,
            theta,
            inequality,
            config.delta,
            Branch::Zero,
        )?);
        if !feasible(&points, i_star) {
            i_star = bisect(&points, i_star, bracket_hi)?;
        }
    }

    // Feasibility must be monotone in I*: check just below, at, and above.
    let below = i_star - config.width;
    let above = 0.5 * (i_star + 1.0);
    let monotone = feasible(&points, i_star)
        && feasible(&points, above)
        && (below <= bracket_lo || !feasible(&points, below));
    if !monotone {
        return Err(Error::NonMonotone { i_star });
    }

    let (worst, idx) = worst_margin(&points, i_star, theta);
    let (slope, intercept) = slope_intercept(theta, i_star);
    Ok(LinearBoundCertificate {
        theta,
        inequality,
        i_star,
        slope,
        intercept,
        local_bound,
        grid,
        tol,
        worst_margin: worst,
        worst_point: (points[idx].a, points[idx].b),
        points_checked: points.len(),
        delta_variant: config.delta,
    })
}

/// Worst margin of the outcome-1 operator inequality over the coarse grid.
pub fn verify_branch1(cert: &LinearBoundCertificate, grid: &GridSpec) -> Result<f64> {
    let points = build_points(
        &grid.coarse_points(),
        cert.theta,
        cert.inequality,
        cert.delta_variant,
        Branch::One,
    )?;
    let (m, idx) = worst_margin(&points, cert.i_star, cert.theta);
    if m < -10.0 * cert.tol {
        return Err(Error::SymmetryViolation {
            margin: m,
            a: points[idx].a,
            b: points[idx].b,
        });
    }
    Ok(m)
}

/// Tolerance for values marginally above a quantum maximum.
const QUANTUM_SLACK: f64 = 1e-6;

/// Fidelity of the source with `|φ⁺⟩` certified by a CHSH value:
/// `max(sqrt(½ + ½(β − β*)/(2√2 − β*)), 1/√2)`.
pub fn input_fidelity_bound(beta: f64) -> Result<f64> {
    if beta > TSIRELSON + QUANTUM_SLACK {
        return Err(Error::NonQuantumValue {
            name: "beta",
            value: beta,
            max: TSIRELSON,
        });
    }
    check_domain("beta", beta, -4.0, f64::INFINITY)?;
    let beta = beta.min(TSIRELSON);
    let inside = 0.5 + 0.5 * (beta - BETA_STAR) / (TSIRELSON - BETA_STAR);
    Ok(inside.max(0.5).sqrt().max(FRAC_1_SQRT_2))
}

/// Fidelity of a conditional state with `|φ_θ^ℓ⟩` certified by a violation
/// `i`: `max(sqrt(cos²θ + sin²θ (i − I*)/(1 − I*)), cos θ)`.
pub fn output_fidelity_bound(i: f64, theta: f64, i_star: f64) -> Result<f64> {
    if i > 1.0 + QUANTUM_SLACK {
        return Err(Error::NonQuantumValue {
            name: "i",
            value: i,
            max: 1.0,
        });
    }
    if !i.is_finite() {
        return Err(Error::Domain {
            name: "i",
            value: i,
            min: f64::NEG_INFINITY,
            max: 1.0,
        });
    }
    check_domain("i_star", i_star, f64::NEG_INFINITY, 1.0 - f64::EPSILON)?;
    let i = i.min(1.0);
    let c = theta.cos();
    let c2 = c * c;
    let inside = c2 + (1.0 - c2) * (i - i_star) / (1.0 - i_star);
    Ok(if inside <= c2 {
        c
    } else {
        inside.min(1.0).sqrt()
    })
}

/// `sqrt(p0/2)·f0 + sqrt((1 − p0)/2)·f1`.
pub fn combine_branches(p0: f64, f0: f64, f1: f64) -> Result<f64> {
    check_domain("p0", p0, 0.0, 1.0)?;
    check_domain("f0", f0, 0.0, 1.0)?;
    check_domain("f1", f1, 0.0, 1.0)?;
    Ok((p0 / 2.0).sqrt() * f0 + ((1.0 - p0) / 2.0).sqrt() * f1)
}

/// `cos(arccos f_in + arccos f_out)`, zero once the angles sum past π/2.
pub fn instrument_fidelity_bound(f_in: f64, f_out: f64) -> Result<f64> {
    check_domain("f_in", f_in, 0.0, 1.0)?;
    check_domain("f_out", f_out, 0.0, 1.0)?;
    let angle = f_in.acos() + f_out.acos();
    Ok(if angle >= FRAC_PI_2 {
        0.0
    } else {
        angle.cos().clamp(0.0, 1.0)
    })
}

/// Every intermediate quantity of an instrument certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityCertificate {
    pub beta: f64,
    pub i0: f64,
    pub i1: f64,
    pub p0: f64,
    pub f_in: f64,
    pub f_out0: f64,
    pub f_out1: f64,
    pub f_out: f64,
    pub bound: f64,
}

/// Composes the source and output certificates into a lower bound on the
/// instrument fidelity. Both branches share the cutoff of `cert`.
pub fn certify_instrument(
    stats: &RunStatistics,
    theta: f64,
    cert: &LinearBoundCertificate,
) -> Result<FidelityCertificate> {
    if (cert.theta - theta).abs() > 1e-12 {
        return Err(Error::Structural(format!(
            "certificate is for theta = {}, requested {theta}",
            cert.theta
        )));
    }
    let f_in = input_fidelity_bound(stats.beta)?;
    let f_out0 = output_fidelity_bound(stats.i0, theta, cert.i_star)?;
    let f_out1 = output_fidelity_bound(stats.i1, theta, cert.i_star)?;
    let f_out = combine_branches(stats.p0, f_out0, f_out1)?.min(1.0);
    let bound = instrument_fidelity_bound(f_in, f_out)?;
    Ok(FidelityCertificate {
        beta: stats.beta,
        i0: stats.i0,
        i1: stats.i1,
        p0: stats.p0,
        f_in,
        f_out0,
        f_out1,
        f_out,
        bound,
    })
}
