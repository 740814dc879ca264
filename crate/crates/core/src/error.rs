use thiserror::Error;

use crate::rooted::RootedViolation;

/// Errors raised by the library. Row and column indices carried by the
/// variants are 1-based so they can be shown to users unchanged.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative entry {value} at ({row}, {col}); a nonnegative matrix is required")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not rooted ({} violated condition(s))", .0.len())]
    NotRooted(Vec<RootedViolation>),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("candidate budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
