//! Figure-data tables: cutoff versus θ, and the instrument bound over
//! `(β, I_θ)`.

use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::TSIRELSON;
use crate::certify::{certify_instrument, find_cutoff, LinearBoundCertificate, SolverConfig};
use crate::error::{Error, Result};
use crate::experiment::RunStatistics;
use crate::quantum::{DeltaVariant, Inequality, THETA_MIN};

/// `θ = (2π + 7)/22 ≈ 0.6`, the angle of the instrument-bound surface.
pub const FIG5_THETA: f64 = (2.0 * PI + 7.0) / 22.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Row {
    pub theta: f64,
    pub inequality: Inequality,
    pub i_star: f64,
    pub slope: f64,
    pub intercept: f64,
    pub worst_margin: f64,
    pub grid_n: usize,
    pub delta_variant: DeltaVariant,
}

impl From<&LinearBoundCertificate> for Fig4Row {
    fn from(c: &LinearBoundCertificate) -> Self {
        Self {
            theta: c.theta,
            inequality: c.inequality,
            i_star: c.i_star,
            slope: c.slope,
            intercept: c.intercept,
            worst_margin: c.worst_margin,
            grid_n: c.grid.n_a,
            delta_variant: c.delta_variant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig5Row {
    pub theta: f64,
    pub beta: f64,
    pub i_theta: f64,
    pub p0: f64,
    pub f_in: f64,
    pub f_out: f64,
    pub bound: f64,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl Fig4Row {
    /// Row for an angle where no cutoff below 1 is certified: `i_star = 1`,
    /// no line, and the negative margin that rejected the bracket top.
    pub fn infeasible(
        theta: f64,
        inequality: Inequality,
        margin: f64,
        config: &SolverConfig,
    ) -> Self {
        Self {
            theta,
            inequality,
            i_star: 1.0,
            slope: f64::NAN,
            intercept: f64::NAN,
            worst_margin: margin,
            grid_n: config.grid.n_a,
            delta_variant: config.delta,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.slope.is_finite()
    }
}

/// Cutoffs over `n_theta` angles in `[0.05, π/4]`, sorted by θ then inequality.
pub fn fig4_sweep(
    n_theta: usize,
    inequalities: &[Inequality],
    config: &SolverConfig,
) -> Result<Vec<Fig4Row>> {
    fig4_sweep_with(n_theta, inequalities, config, |t, q| {
        find_cutoff(t, q, config)
    })
}

/// As [`fig4_sweep`], obtaining each certificate from `solve` (for example
/// through a cache). Angles where the extraction channels cannot certify
/// any cutoff produce [`Fig4Row::infeasible`] rows; other errors propagate.
pub fn fig4_sweep_with<F>(
    n_theta: usize,
    inequalities: &[Inequality],
    config: &SolverConfig,
    solve: F,
) -> Result<Vec<Fig4Row>>
where
    F: Fn(f64, Inequality) -> Result<LinearBoundCertificate> + Sync,
{
    let jobs: Vec<(f64, Inequality)> = linspace(THETA_MIN, FRAC_PI_4, n_theta)
        .into_iter()
        .flat_map(|t| inequalities.iter().map(move |&q| (t, q)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(t, q)| match solve(t, q) {
            Ok(c) => Ok(Fig4Row::from(&c)),
            Err(Error::ChannelFamilyInvalid { margin, .. }) => {
                Ok(Fig4Row::infeasible(t, q, margin, config))
            }
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|x, y| {
        x.theta
            .total_cmp(&y.theta)
            .then(x.inequality.as_str().cmp(y.inequality.as_str()))
    });
    Ok(rows)
}

/// Instrument bound over `β ∈ [2, 2√2]` and `I_θ ∈ [local bound, 1]`, with
/// `p0 = ½` and `i0 = i1 = I_θ`. Rows are sorted by β, then `I_θ`.
pub fn fig5_sweep(
    cert: &LinearBoundCertificate,
    n_beta: usize,
    n_i: usize,
) -> Result<Vec<Fig5Row>> {
    if n_beta == 0 || n_i == 0 {
        return Err(Error::Structural(
            "fig5 grid needs at least one point per axis".into(),
        ));
    }
    let betas = linspace(2.0, TSIRELSON, n_beta);
    let is = linspace(cert.local_bound, 1.0, n_i);
    let jobs: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| is.iter().map(move |&i| (b, i)))
        .collect();
    jobs.par_iter()
        .map(|&(beta, i)| {
            let stats = RunStatistics {
                beta,
                i0: i,
                i1: i,
                p0: 0.5,
            };
            let f = certify_instrument(&stats, cert.theta, cert)?;
            Ok(Fig5Row {
                theta: cert.theta,
                beta,
                i_theta: i,
                p0: 0.5,
                f_in: f.f_in,
                f_out: f.f_out,
                bound: f.bound,
            })
        })
        .collect()
}
