use thiserror::Error;

/// Errors raised anywhere in the certification stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {0} exceeds the supported maximum of 8")]
    DimensionOverflow(usize),

    #[error("unsupported matrix dimension {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not normalized (trace {trace})")]
    Normalization { trace: f64 },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("{name} = {value} outside domain [{min}, {max}]")]
    Domain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("every outcome of the instrument has vanishing probability")]
    DegenerateInstrument,

    #[error("instrument construction failed: {0}")]
    Construction(String),

    #[error("{name} = {value} exceeds the maximal quantum value {max}")]
    NonQuantumValue {
        name: &'static str,
        value: f64,
        max: f64,
    },

    #[error(
        "operator inequality infeasible even at i_star = {i_star}: margin {margin:e} at (a, b) = ({a}, {b})"
    )]
    ChannelFamilyInvalid {
        i_star: f64,
        margin: f64,
        a: f64,
        b: f64,
    },

    #[error("feasibility is not monotone in i_star near {i_star}")]
    NonMonotone { i_star: f64 },

    #[error("branch-1 operator inequality violated: margin {margin:e} at (a, b) = ({a}, {b})")]
    SymmetryViolation { margin: f64, a: f64, b: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            min,
            max,
        })
    }
}
