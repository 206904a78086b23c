//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, fitting, prediction, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point configuration contains coincident points, so pairwise
    /// potentials are infinite.
    #[error("degenerate configuration: points {i} and {j} coincide")]
    DegenerateConfiguration { i: usize, j: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Input row lies outside the closed unit ball.
    #[error("row {row} outside the unit ball: norm {norm} > 1 + 1e-9")]
    OutOfDomain { row: usize, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
