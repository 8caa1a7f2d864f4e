use thiserror::Error;

/// Errors raised by the panel pipeline and estimators.
///
/// The variants map onto the CLI's failure classes: `Parse`/`Csv` are parse
/// failures, `Domain` covers invalid inputs to pure operations, and the
/// remaining variants are estimation failures.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("collinear column `{0}` in design matrix")]
    RankDeficient(String),

    #[error("fixed-effect demeaning did not converge after {iterations} sweeps (last change {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }

    /// Failure class for one-line CLI diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::Csv(_) => "parse",
            Error::Domain(_) => "domain",
            Error::Estimation(_) | Error::RankDeficient(_) | Error::NonConvergence { .. } => {
                "estimation"
            }
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
