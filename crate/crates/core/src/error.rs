use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a complex: composite of consecutive maps is nonzero")]
    NotAComplex,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("weight mismatch: expected {expected}, got {got}")]
    WeightMismatch { expected: usize, got: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
