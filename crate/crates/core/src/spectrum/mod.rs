//! Candidate spectra: canonical level sets, orthogonality checks,
//! completeness-constant estimates, Parseval identities on step functions,
//! spectrum completion by integer offsets, and orthogonal-set search.

mod candidate;
mod complete;
mod delta;
mod ortho;
mod parseval;

pub use candidate::{canonical_levels, cycle_generated_candidate, Provenance, SpectrumCandidate};
pub use complete::{complete_spectrum, Completion, CompletionParams, LevelMeta};
pub use delta::{delta_estimate, DeltaEstimate};
pub use ortho::{
    orthogonal_set_search, orthogonality_check, OrthoReport, OrthoSearchResult,
};
pub use parseval::{parseval_defect, ParsevalContext, ParsevalReport, StepFunction};

use num::rational::BigRational;
use thiserror::Error;

use crate::fourier::FourierError;
use crate::latmath::{LatticeError, RatVec};
use crate::triple::TripleError;

pub(crate) fn rat_point_display(v: &RatVec) -> String {
    let cells: Vec<String> = v.iter().map(BigRational::to_string).collect();
    format!("({})", cells.join(", "))
}

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Triple(#[from] Box<TripleError>),
    #[error("level construction exceeds cap {cap}")]
    SizeCap { cap: usize },
    #[error("pair count {pairs} exceeds cap {cap}")]
    PairCap { pairs: usize, cap: usize },
    #[error("grid size exceeds cap {cap}")]
    GridCap { cap: usize },
    #[error("periodic zero set is nonempty: {point} certified for all {shifts} shifts")]
    PeriodicZeroFound { point: String, shifts: usize },
    #[error(
        "no admissible integer shift within kmax={kmax} for j={j} at level {level} \
         (periodic zero set may be nonempty, or eps0/delta0 too aggressive)"
    )]
    NoAdmissibleShift {
        level: usize,
        j: String,
        kmax: i64,
    },
    #[error("candidate has no level {0}")]
    LevelOutOfRange(usize),
    #[error("weight count {got} does not match level size {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("frequency {0} is not an integer vector")]
    NonIntegerFrequency(String),
}

impl From<TripleError> for SpectrumError {
    fn from(e: TripleError) -> Self {
        SpectrumError::Triple(Box::new(e))
    }
}
