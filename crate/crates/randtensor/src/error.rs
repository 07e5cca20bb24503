//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by tensor construction, I/O, sampling, solving, and the
/// Monte Carlo harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("multi-index {index:?} out of range for shape {dims:?}")]
    IndexOutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed tensor file header: {0}")]
    MalformedHeader(String),

    #[error("tensor file length mismatch: expected {expected} payload bytes, found {actual}")]
    LengthMismatch { expected: u64, actual: u64 },

    #[error("tensor file payload contains a non-finite value at element {0}")]
    NonFinitePayload(usize),

    #[error("functional incompatible with tensor: {0}")]
    IncompatibleFunctional(String),

    #[error("matrix is not symmetric: {0}")]
    AsymmetricMatrix(String),

    #[error("all solver starts were degenerate (zero iterates)")]
    AllStartsDegenerate,

    #[error("grid oracle does not support this instance: {0}")]
    UnsupportedOracle(String),

    #[error("{unconverged} of {trials} trials failed to converge (over the 5% cap)")]
    TooManyUnconverged { unconverged: usize, trials: usize },

    #[error("no converged trials to summarize")]
    NoConvergedTrials,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
