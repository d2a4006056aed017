//! CSV and JSON emission.
//!
//! Reals are written with 17 significant digits so that every value
//! re-parses to the same `f64`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use diqc_core::certify::{FidelityCertificate, LinearBoundCertificate};
use diqc_core::sweep::{Fig4Row, Fig5Row};
use diqc_core::{NoiseModel, RunStatistics};
use serde::Serialize;

use crate::args::{Format, OutputArgs};
use crate::AppError;

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A type with a fixed CSV schema.
pub trait CsvRecord {
    const HEADER: &'static str;
    fn row(&self) -> String;
}

impl CsvRecord for LinearBoundCertificate {
    const HEADER: &'static str = "theta,inequality,i_star,slope,intercept,local_bound,grid_n_a,grid_n_b,refine_levels,refine_n,tol,worst_margin,worst_a,worst_b,points_checked,delta_variant";
    fn row(&self) -> String {
        [
            real(self.theta),
            self.inequality.to_string(),
            real(self.i_star),
            real(self.slope),
            real(self.intercept),
            real(self.local_bound),
            self.grid.n_a.to_string(),
            self.grid.n_b.to_string(),
            self.grid.refine_levels.to_string(),
            self.grid.refine_n.to_string(),
            real(self.tol),
            real(self.worst_margin),
            real(self.worst_point.0),
            real(self.worst_point.1),
            self.points_checked.to_string(),
            self.delta_variant.to_string(),
        ]
        .join(",")
    }
}

impl CsvRecord for FidelityCertificate {
    const HEADER: &'static str = "beta,i0,i1,p0,f_in,f_out0,f_out1,f_out,bound";
    fn row(&self) -> String {
        [
            self.beta,
            self.i0,
            self.i1,
            self.p0,
            self.f_in,
            self.f_out0,
            self.f_out1,
            self.f_out,
            self.bound,
        ]
        .map(real)
        .join(",")
    }
}

impl CsvRecord for Fig4Row {
    const HEADER: &'static str =
        "theta,inequality,i_star,slope,intercept,worst_margin,grid_n,delta_variant";
    fn row(&self) -> String {
        [
            real(self.theta),
            self.inequality.to_string(),
            real(self.i_star),
            real(self.slope),
            real(self.intercept),
            real(self.worst_margin),
            self.grid_n.to_string(),
            self.delta_variant.to_string(),
        ]
        .join(",")
    }
}

impl CsvRecord for Fig5Row {
    const HEADER: &'static str = "theta,beta,i_theta,p0,f_in,f_out,bound";
    fn row(&self) -> String {
        [
            self.theta,
            self.beta,
            self.i_theta,
            self.p0,
            self.f_in,
            self.f_out,
            self.bound,
        ]
        .map(real)
        .join(",")
    }
}

/// One simulated run with its certificate and the oracle value.
#[derive(Debug, Serialize)]
pub struct SimulationRecord {
    pub theta: f64,
    pub noise: NoiseModel,
    pub statistics: RunStatistics,
    pub certificate: FidelityCertificate,
    pub oracle: f64,
}

impl CsvRecord for SimulationRecord {
    const HEADER: &'static str = "theta,visibility,alice_offset,bob_offset,instrument_theta,branch_depolarization,beta,i0,i1,p0,f_in,f_out,bound,oracle";
    fn row(&self) -> String {
        let n = &self.noise;
        let c = &self.certificate;
        [
            self.theta,
            n.visibility,
            n.alice_offset,
            n.bob_offset,
            n.instrument_theta,
            n.branch_depolarization,
            c.beta,
            c.i0,
            c.i1,
            c.p0,
            c.f_in,
            c.f_out,
            c.bound,
            self.oracle,
        ]
        .map(real)
        .join(",")
    }
}

fn csv<R: CsvRecord>(records: &[R]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(R::HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.row());
        out.push('\n');
    }
    out
}

/// Writes one record, as a CSV row or a JSON object.
pub fn emit_one<R: CsvRecord + Serialize>(record: &R, output: &OutputArgs) -> Result<(), AppError> {
    let text = match output.format {
        Format::Csv => csv(std::slice::from_ref(record)),
        Format::Json => json(record)?,
    };
    write(&text, output.out.as_deref())
}

/// Writes a table, as CSV rows or a JSON array.
pub fn emit_many<R: CsvRecord + Serialize>(
    records: &[R],
    output: &OutputArgs,
) -> Result<(), AppError> {
    let text = match output.format {
        Format::Csv => csv(records),
        Format::Json => json(&records)?,
    };
    write(&text, output.out.as_deref())
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, AppError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| AppError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(text: &str, path: Option<&Path>) -> Result<(), AppError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| AppError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| AppError::Io(e.to_string())),
    }
}
