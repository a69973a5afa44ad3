use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid state parameters: {0}")]
    InvalidSpec(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("dimension d = {0} is not prime")]
    PrimeRequired(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid measurement basis: {0}")]
    InvalidMeasurement(String),

    #[error("state is not circulant (residual {residual:.3e})")]
    NotCirculant { residual: f64 },

    #[error("malformed state file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
