use thiserror::Error;

/// Errors raised by problem evaluation, proximal operators and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("non-finite iterate at iteration {iter}")]
    NumericalFailure { iter: usize },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    Asymmetric(f64),

    #[error("linesearch stalled after {trials} trials at iteration {iter}")]
    LinesearchStalled { iter: usize, trials: usize },

    #[error("zero displacement between consecutive iterates")]
    StationaryDisplacement,

    #[error("starting point is already stationary")]
    AlreadyStationary,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem generation failed: {0}")]
    Generation(String),

    #[error("reference solution required")]
    ReferenceRequired,

    #[error("iterates were not recorded for this trace")]
    IteratesRequired,
}

pub type Result<T> = std::result::Result<T, Error>;
