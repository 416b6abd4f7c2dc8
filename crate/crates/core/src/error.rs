use thiserror::Error;

/// Errors raised by the algebra layer and the resolution driver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero ideal rejected: {0}")]
    ZeroIdeal(&'static str),
    #[error("undefined value: {0}")]
    Undefined(&'static str),
    #[error("point is not in the singular locus")]
    NotInSing,
    #[error("center was not permissible: {0}")]
    NotPermissible(String),
    #[error("empty center")]
    EmptyCenter,
    #[error("non-graph hypersurface: {0}")]
    NonGraph(String),
    #[error("unsupported geometry: {0}")]
    Unsupported(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
