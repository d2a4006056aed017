//! On-disk cache of cutoff certificates.
//!
//! Entries are keyed by θ, inequality, grid, tolerance and angle map. The
//! key uses the bit patterns of the reals so distinct inputs never collide.

use std::fs;
use std::path::{Path, PathBuf};

use diqc_core::certify::{find_cutoff, LinearBoundCertificate, SolverConfig};
use diqc_core::Inequality;

use crate::AppError;

pub struct CutoffCache {
    dir: Option<PathBuf>,
}

impl CutoffCache {
    pub fn new(dir: Option<&Path>) -> Self {
        Self {
            dir: dir.map(Path::to_path_buf),
        }
    }

    fn path(&self, theta: f64, inequality: Inequality, config: &SolverConfig) -> Option<PathBuf> {
        let g = &config.grid;
        self.dir.as_ref().map(|d| {
            d.join(format!(
                "cutoff_{:016x}_{}_{}x{}_r{}x{}_tol{:016x}_w{:016x}_{}.json",
                theta.to_bits(),
                inequality,
                g.n_a,
                g.n_b,
                g.refine_levels,
                g.refine_n,
                config.tol.to_bits(),
                config.width.to_bits(),
                config.delta,
            ))
        })
    }

    /// Returns the cached certificate when one matches, otherwise solves and stores.
    pub fn get(
        &self,
        theta: f64,
        inequality: Inequality,
        config: &SolverConfig,
    ) -> Result<LinearBoundCertificate, AppError> {
        let path = self.path(theta, inequality, config);
        if let Some(cached) = path.as_deref().and_then(load) {
            let matches = cached.theta.to_bits() == theta.to_bits()
                && cached.inequality == inequality
                && cached.grid == config.grid
                && cached.tol.to_bits() == config.tol.to_bits()
                && cached.delta_variant == config.delta;
            if matches {
                return Ok(cached);
            }
        }
        let cert = find_cutoff(theta, inequality, config)?;
        if let Some(p) = path {
            store(&p, &cert)?;
        }
        Ok(cert)
    }
}

fn load(path: &Path) -> Option<LinearBoundCertificate> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn store(path: &Path, cert: &LinearBoundCertificate) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let text = serde_json::to_string(cert).map_err(|e| AppError::Io(e.to_string()))?;
    // Write then rename so concurrent readers never see a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}
