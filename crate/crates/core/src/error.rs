use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A length or shape does not fit the operation (e.g. non power-of-two FFT).
    #[error("sizing error: {0}")]
    Sizing(String),

    /// A scalar parameter lies outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input failed structural validation (e.g. a non-Hermitian matrix).
    #[error("validation error: {0}")]
    Validation(String),

    /// A figure of merit is undefined for the input, usually a zero reference energy.
    #[error("undefined metric: {metric} at index {index}")]
    UndefinedMetric { metric: &'static str, index: usize },

    /// A linear system could not be solved.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// Iterates blew past the divergence guard.
    #[error("divergence at iteration {iter}: residual {residual:.3e} exceeds {limit:.3e}")]
    Divergence { iter: usize, residual: f64, limit: f64 },

    /// Experiment configuration is inconsistent or unparsable.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
