use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular pivot at column {column}")]
    SingularPivot { column: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("pole proximity: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("continued fraction extraction unstable: {0}")]
    CfInstability(String),
    #[error("inadmissible pair: {0}")]
    Inadmissible(String),
    #[error("evaluation on the branch cut at {0}")]
    OnCut(String),
    #[error("tail bound too large: {0}")]
    TailBound(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
