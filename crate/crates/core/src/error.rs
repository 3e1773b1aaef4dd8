use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at node {index} (x = {x}); shift the node count by one to move nodes off the pole")]
    NonFiniteSample { index: usize, x: f64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("operation requires a grid symmetric about x = 0")]
    AsymmetricGrid,

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("wavefunction vanishes at x = {x}; its logarithmic derivative is undefined there")]
    EvaluationAtZero { x: f64 },

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("logarithm argument is not positive at x = {x}")]
    BranchViolation { x: f64 },

    #[error("integration path from the anchor crosses a pole at x = {pole}")]
    PoleOnPath { pole: f64 },

    #[error("operator coefficient is singular at node {index} (x = {x})")]
    PoleOnGrid { index: usize, x: f64 },

    #[error("normalization integral diverges (value {value})")]
    DivergentNorm { value: f64 },

    #[error("eigenvalue iteration {index} did not converge")]
    NoConvergence { index: usize },

    #[error("operation requires the fixed-k hierarchy")]
    UnsupportedMode,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
