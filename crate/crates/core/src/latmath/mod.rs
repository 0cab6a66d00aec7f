//! Exact integer/rational lattice arithmetic.
//!
//! Everything in this module is computed over arbitrary-precision integers
//! and rationals; no floating point enters residue or lattice computations.
//! The expansivity test is the one place a numeric fallback exists, and it
//! reports [`Expansivity::Indeterminate`] rather than guessing.

mod expansive;
mod hnf;
mod lattice;
mod matrix;
mod residues;
mod snf;

pub use expansive::{is_expansive, Expansivity};
pub use hnf::row_hnf;
pub use lattice::{dual_lattice, smallest_invariant_lattice, Lattice};
pub use matrix::{int_sorted, int_vec, DigitSet, IntMatrix, IntVec, RatMatrix, RatVec};
pub use residues::{complete_residues, reduce_mod, residues_distinct};
pub use snf::smith_normal_form;

use thiserror::Error;

/// Errors surfaced by exact lattice computations.
#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not expansive: {0:?}")]
    NotExpansive(Expansivity),
    #[error("lattice is not full rank (rank {rank} < dim {dim})")]
    NotFullRank { rank: usize, dim: usize },
    #[error("digit set invalid: {0}")]
    BadDigitSet(String),
}
