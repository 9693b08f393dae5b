//! Sparse matrices, direct solves and the 1-norm condition estimate.

mod condest;
mod lu;
mod sparse;

pub use condest::{condest_1norm, condest_with, CONDEST_MAX_ITER};
pub use lu::{factorize, Factorization, RESIDUAL_WARN};
pub use sparse::{SparseMatrix, Triplets};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is numerically singular (first failing index {pivot})")]
    SingularMatrix { pivot: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("factorization failed: {0}")]
    Backend(String),
}
