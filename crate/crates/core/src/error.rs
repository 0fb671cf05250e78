//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; identifies the offending row/column where known.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    /// Input violates a documented precondition (bad tcode, date gap, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// Arithmetic domain violation (log of a non-positive value, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Dimension disagreement between data and model.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Training aborted (non-finite loss, empty set, ...).
    #[error("training failed: {0}")]
    Training(String),

    /// MCMC chain diverged or produced non-finite states.
    #[error("sampler diverged: {0}")]
    Sampler(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
