//! The analytic core: mask function, Fourier transform of the invariant
//! measure with certified truncation error, Fourier matrices, and
//! singular-value frame bounds.

mod mask;
mod matrix;
mod muhat;

pub use mask::Mask;
pub use matrix::{build_fourier_matrix, qmf_residual, FourierMatrix, FrameBounds};
pub use muhat::{MuHatEvaluator, MuHatValue, RationalMuHat, SpectralDecay, ZeroScanOutcome};

use thiserror::Error;

/// Default tolerance for numeric comparisons, overridable per call.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not expansive; no contracting power found")]
    NoContraction,
    #[error("tolerance {requested:e} unreachable at depth {max_depth}; achieved {achieved:e}")]
    ToleranceUnreachable {
        requested: f64,
        max_depth: usize,
        achieved: f64,
    },
    #[error("empty digit or frequency list")]
    EmptyMatrix,
    #[error("operation requires a square matrix ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigenvalue residual {residual:e} exceeds 1e-10")]
    EigenResidual { residual: f64 },
    #[error(transparent)]
    Lattice(#[from] crate::latmath::LatticeError),
}
