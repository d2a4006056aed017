//! `diqc`: cutoffs, instrument certificates, simulated runs and figure data.
//!
//! Exit codes: 0 on success, 1 for usage, parse or I/O errors, 2 for domain
//! errors and infeasible certificates.

mod args;
mod cache;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;
use diqc_core::certify::certify_instrument;
use diqc_core::experiment::{oracle_choi_fidelity, simulate_run_for};
use diqc_core::sweep::{fig4_sweep_with, fig5_sweep};
use diqc_core::{Inequality, RunStatistics};

use args::{Cli, Command};
use cache::CutoffCache;
use output::{emit_many, emit_one, SimulationRecord};

#[derive(Debug)]
pub enum AppError {
    Io(String),
    Domain(diqc_core::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Io(_) => 1,
            AppError::Domain(_) => 2,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Io(msg) => write!(f, "{msg}"),
            AppError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<diqc_core::Error> for AppError {
    fn from(e: diqc_core::Error) -> Self {
        AppError::Domain(e)
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Cutoff(a) => {
            let cache = CutoffCache::new(a.solver.cache_dir.as_deref());
            let cert = cache.get(a.theta, a.inequality, &a.solver.config())?;
            emit_one(&cert, &a.output)
        }
        Command::Certify(a) => {
            let cache = CutoffCache::new(a.solver.cache_dir.as_deref());
            let cert = cache.get(a.theta, a.inequality, &a.solver.config())?;
            let stats = RunStatistics {
                beta: a.beta,
                i0: a.i0,
                i1: a.i1,
                p0: a.p0,
            };
            emit_one(&certify_instrument(&stats, a.theta, &cert)?, &a.output)
        }
        Command::Simulate(a) => {
            let noise = a.noise();
            let statistics = simulate_run_for(&noise, a.theta, a.inequality)?;
            let oracle = oracle_choi_fidelity(&noise, a.theta)?;
            let cache = CutoffCache::new(a.solver.cache_dir.as_deref());
            let cert = cache.get(a.theta, a.inequality, &a.solver.config())?;
            let certificate = certify_instrument(&statistics, a.theta, &cert)?;
            let record = SimulationRecord {
                theta: a.theta,
                noise,
                statistics,
                certificate,
                oracle,
            };
            emit_one(&record, &a.output)
        }
        Command::SweepFig4(a) => {
            let cache = CutoffCache::new(a.solver.cache_dir.as_deref());
            let config = a.solver.config();
            let inequalities = match a.inequality {
                Some(q) => vec![q],
                None => vec![Inequality::New, Inequality::Tilted],
            };
            // The cache reports I/O failures separately from solver errors.
            let io_failure = std::sync::Mutex::new(None);
            let rows = fig4_sweep_with(a.n_theta as usize, &inequalities, &config, |t, q| {
                cache.get(t, q, &config).map_err(|e| match e {
                    AppError::Domain(d) => d,
                    AppError::Io(msg) => {
                        *io_failure.lock().unwrap() = Some(msg.clone());
                        diqc_core::Error::Structural(msg)
                    }
                })
            });
            if let Some(msg) = io_failure.into_inner().unwrap() {
                return Err(AppError::Io(msg));
            }
            let rows = rows?;
            for r in rows.iter().filter(|r| !r.is_feasible()) {
                eprintln!(
                    "warning: no cutoff certified at theta = {} ({}): margin {:e} at i_star -> 1",
                    r.theta, r.inequality, r.worst_margin
                );
            }
            emit_many(&rows, &a.output)
        }
        Command::SweepFig5(a) => {
            let cache = CutoffCache::new(a.solver.cache_dir.as_deref());
            let cert = cache.get(a.theta, a.inequality, &a.solver.config())?;
            let rows = fig5_sweep(&cert, a.n_beta as usize, a.n_i as usize)?;
            emit_many(&rows, &a.output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
