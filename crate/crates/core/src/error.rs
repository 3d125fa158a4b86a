use std::ops::Range;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("empty series")]
    EmptySeries,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("no observed entries")]
    NoObservations,

    /// A block has a variable with no observed cell. Ranges are 1-based and inclusive.
    #[error("insufficient observations in block [{}..{}] (variable {variable})", .block.start + 1, .block.end)]
    InsufficientObservations { block: Range<usize>, variable: usize },

    #[error("{method}: {msg}")]
    Baseline { method: &'static str, msg: String },

    #[error("scoring: {0}")]
    Scoring(String),

    #[error("svd failed to converge")]
    Svd,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
