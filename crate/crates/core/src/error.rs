use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid state vector: {0}")]
    InvalidState(String),

    #[error("probability {value} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("degenerate parametrization: {0}")]
    Degenerate(String),

    #[error("{0}")]
    OutOfDomain(String),

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("invalid block model: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
