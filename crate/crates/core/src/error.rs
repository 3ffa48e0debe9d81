use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: leg {left} has dimension {left_dim}, leg {right} has dimension {right_dim}")]
    DimensionMismatch {
        left: usize,
        left_dim: usize,
        right: usize,
        right_dim: usize,
    },

    #[error("leg {0} appears more than once in the pairing")]
    DuplicateLeg(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite component in input")]
    NonFinite,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("label parse error: {0}")]
    Label(String),

    #[error("state validation failed: {quantity} = {value} ({reason})")]
    Validation {
        quantity: &'static str,
        value: f64,
        reason: String,
    },

    #[error("state file parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
