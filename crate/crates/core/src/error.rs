use thiserror::Error;

/// Errors raised by the basis, linear-algebra, state and reduction layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode set {bits:#x}: {reason}")]
    InvalidModeSet { bits: u64, reason: String },
    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },
    #[error("mode sets {a:#x} and {b:#x} overlap")]
    NonDisjoint { a: u64, b: u64 },
    #[error("capacity exceeded: {what} = {requested} > limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("marginal mismatch: max deviation {deviation:e}")]
    MarginalMismatch { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
