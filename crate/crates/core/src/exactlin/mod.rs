//! Exact linear algebra over the rationals.
//!
//! Everything downstream reduces to three primitives here: reduced row
//! echelon form, kernels, and the subspace lattice operations built on them.

mod matrix;
mod rational;
mod sparse;
mod subspace;

pub use matrix::RationalMatrix;
pub use rational::Rational;
pub use sparse::{sparse_rank, to_sparse, SparseEchelon, SparseRow};
pub use subspace::{kernel_basis, rref, SubspaceBasis};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}
