use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diqc_core::certify::{GridSpec, SolverConfig};
use diqc_core::sweep::FIG5_THETA;
use diqc_core::{DeltaVariant, Inequality, NoiseModel};

#[derive(Debug, Parser)]
#[command(
    name = "diqc",
    version,
    about = "Device-independent certification of qubit instruments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a cutoff certificate for one angle.
    Cutoff(CutoffArgs),
    /// Certify an instrument from observed violations.
    Certify(CertifyArgs),
    /// Simulate a noisy run and certify it.
    Simulate(SimulateArgs),
    /// Cutoff versus θ for both inequalities.
    #[command(name = "sweep-fig4")]
    SweepFig4(Fig4Args),
    /// Instrument bound over a (β, I_θ) grid.
    #[command(name = "sweep-fig5")]
    SweepFig5(Fig5Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Grid points per axis.
    #[arg(long = "grid-n", default_value_t = 201, value_parser = clap::value_parser!(u64).range(101..))]
    pub grid_n: u64,
    /// Margins at or above `-tol` count as positive semidefinite.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    /// Bob's angle map.
    #[arg(long, default_value = "logarithmic", value_parser = parse_delta)]
    pub delta: DeltaVariant,
    /// Directory for cached cutoff certificates.
    #[arg(long = "cache-dir", env = "DIQC_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            grid: GridSpec::square(self.grid_n as usize),
            tol: self.tol,
            delta: self.delta,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
    /// Target angle θ in radians.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_theta)]
    pub theta: f64,
    #[arg(long, default_value = "new", value_parser = parse_inequality)]
    pub inequality: Inequality,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = parse_theta)]
    pub theta: f64,
    #[arg(long, default_value = "new", value_parser = parse_inequality)]
    pub inequality: Inequality,
    /// Observed CHSH value.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Violation after outcome 0.
    #[arg(long, allow_negative_numbers = true)]
    pub i0: f64,
    /// Violation after outcome 1, evaluated on relabeled data.
    #[arg(long, allow_negative_numbers = true)]
    pub i1: f64,
    /// Probability of outcome 0.
    #[arg(long)]
    pub p0: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = parse_theta)]
    pub theta: f64,
    #[arg(long, default_value = "new", value_parser = parse_inequality)]
    pub inequality: Inequality,
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    #[arg(
        long = "alice-offset",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub alice_offset: f64,
    #[arg(
        long = "bob-offset",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub bob_offset: f64,
    /// Angle of the implemented instrument; defaults to θ.
    #[arg(long = "instrument-theta")]
    pub instrument_theta: Option<f64>,
    /// Pauli noise weight inside each branch.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SimulateArgs {
    pub fn noise(&self) -> NoiseModel {
        NoiseModel {
            visibility: self.visibility,
            alice_offset: self.alice_offset,
            bob_offset: self.bob_offset,
            instrument_theta: self.instrument_theta.unwrap_or(self.theta),
            branch_depolarization: self.eta,
        }
    }
}

#[derive(Debug, Args)]
pub struct Fig4Args {
    /// Number of θ values in [0.05, π/4].
    #[arg(long = "n-theta", default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_theta: u64,
    /// Restrict to one inequality; both when omitted.
    #[arg(long, value_parser = parse_inequality)]
    pub inequality: Option<Inequality>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Fig5Args {
    #[arg(long, default_value_t = FIG5_THETA, allow_negative_numbers = true, value_parser = parse_theta)]
    pub theta: f64,
    #[arg(long, default_value = "new", value_parser = parse_inequality)]
    pub inequality: Inequality,
    #[arg(long = "n-beta", default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_beta: u64,
    #[arg(long = "n-i", default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_i: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Rounded decimal forms of π/4 such as `0.7853981634` lie just above it;
/// anything within 1e-9 is read as π/4.
fn parse_theta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Ok(if (v - FRAC_PI_4).abs() <= 1e-9 {
        FRAC_PI_4
    } else {
        v
    })
}

fn parse_inequality(s: &str) -> Result<Inequality, String> {
    s.parse()
}

fn parse_delta(s: &str) -> Result<DeltaVariant, String> {
    s.parse()
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}
