use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    #[error("unsupported polynomial degree {0} (expected 1, 2 or 3)")]
    UnsupportedDegree(usize),

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trajectory too short: duration {duration} must exceed twice the window {window}")]
    TooShort { duration: f64, window: f64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
