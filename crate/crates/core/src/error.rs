use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid level: {0}")]
    InvalidLevel(String),

    #[error("{what} exceeds budget ({value} > {limit})")]
    BudgetExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("vertices not connected within the ball")]
    Unreachable,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("level containment violated: {0}")]
    LevelContainment(String),

    #[error("internal check failed: {0}")]
    Internal(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
