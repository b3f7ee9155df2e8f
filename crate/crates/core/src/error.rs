use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("oracle contract violated: {0}")]
    ContractViolation(String),
    #[error("radius {radius} is not certified for this matrix (known bound: {bound})")]
    Uncertified { radius: String, bound: String },
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
