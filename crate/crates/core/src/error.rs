use thiserror::Error;

/// Errors produced by grid construction, estimation and identification.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("root finder failed: {0}")]
    RootFind(String),

    #[error("time-step bound would require {steps} steps (limit {limit}); request a coarser grid")]
    StepLimit { steps: u64, limit: u64 },

    #[error("forecast state became non-finite at step {step}")]
    Blowup { step: usize },

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
