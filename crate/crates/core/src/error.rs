use thiserror::Error;

/// Errors raised by the library. Variants map onto the failure classes of the
/// individual operations (mode, domain, precondition, numerical).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation `{0}` requires exact arithmetic")]
    ModeMismatch(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("spectrum is not representable over the Gaussian rationals")]
    SpectrumNotRepresentable,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("refusing to analyse a truncated ball: {0}")]
    Truncated(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
}

pub type Result<T> = std::result::Result<T, Error>;
