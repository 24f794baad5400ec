use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: expected an even integer in 2..=8")]
    UnsupportedDimension(usize),
    #[error("invalid degree {degree} for dimension {dim}")]
    InvalidDegree { degree: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("base torus mismatch: {0} vs {1}")]
    BaseMismatch(usize, usize),
    #[error("inhomogeneous slot: {0}")]
    Inhomogeneous(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
    #[error("tangent count mismatch: expected {expected}, found {found}")]
    TangentCount { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}
