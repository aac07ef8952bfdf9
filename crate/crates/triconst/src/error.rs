//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the library. Certificate failures are *not* errors: they
/// are reported as verdicts.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate triangle: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("matrix is not numerically positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
