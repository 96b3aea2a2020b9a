use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} positions, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("value {value} out of range at position {position} (cardinality {cardinality})")]
    ValueOutOfRange {
        position: usize,
        value: u32,
        cardinality: u32,
    },

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("partial solutions conflict at position {0}")]
    NotMergeable(usize),

    #[error("partial solution has a wildcard at position {0}")]
    UnfixedCell(usize),

    #[error("position {0} is not fixed")]
    PositionNotFixed(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("could not construct problem: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
