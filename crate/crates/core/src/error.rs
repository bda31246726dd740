//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid network spec: {0}")]
    InvalidSpec(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid block plan: {0}")]
    InvalidPlan(String),

    #[error("block index {j} out of range 1..={q}")]
    BlockIndex { j: usize, q: usize },

    #[error("data has {got} rows but the plan requires at least {required}")]
    InsufficientData { got: usize, required: usize },

    #[error("too few subsample blocks: {got} < {min}")]
    TooFewBlocks { got: usize, min: usize },

    #[error("non-finite parameters during training ({context})")]
    NonFiniteParams { context: String },

    #[error(
        "no power-law fit: raw bias averages must be nonzero and share a sign \
         (B1 = {b1_hat}, B2 = {b2_hat})"
    )]
    NoPowerLawFit { b1_hat: f64, b2_hat: f64 },

    #[error("training block {block} failed: {source}")]
    BlockTraining {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error at line {line}: {message}")]
    CsvData { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves (diverged training,
    /// falsified power-law model) as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteParams { .. } | Error::NoPowerLawFit { .. }
        ) || matches!(self, Error::BlockTraining { source, .. } if source.is_numerical())
    }
}
