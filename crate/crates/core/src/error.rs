use thiserror::Error;

/// Errors raised by the divrisk routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported divergence `{0}`")]
    UnsupportedDivergence(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("reference measure has a zero entry at index {index}")]
    Support { index: usize },

    #[error("empty data")]
    EmptyData,

    #[error("invalid value {value} at index {index}")]
    InvalidValue { index: usize, value: f64 },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("multipliers do not solve the characterizing equations (residuals {mean_residual:.3e}, {divergence_residual:.3e})")]
    StaleMultipliers {
        mean_residual: f64,
        divergence_residual: f64,
    },

    #[error("brute-force oracle supports at most {max} atoms, got {found}")]
    OracleSize { max: usize, found: usize },

    #[error("invalid asset panel: {0}")]
    Panel(String),

    /// A bracketing search ran out of room; `trace` holds the probed `(argument, value)` pairs.
    #[error("bracket search failed in {stage} after {} probes", trace.len())]
    Bracket {
        stage: &'static str,
        trace: Vec<(f64, f64)>,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "risk aversion must be positive and finite",
        })
    }
}
