use thiserror::Error;

/// Failures raised by grid operators, geometry construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("solvability condition violated: mean {mean:e} exceeds tolerance {tol:e}")]
    Solvability { mean: f64, tol: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("mask selects no nodes")]
    EmptyMask,

    #[error("indicator sampling error: {0}")]
    Sampling(String),

    #[error("dense assembly refused: dimension {dim} exceeds limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("{0}")]
    Undefined(String),

    #[error("time step {step} failed: {reason}")]
    StepFailed { step: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
