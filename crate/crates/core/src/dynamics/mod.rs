//! The transition system `(tau_l, m_B)` on frequency space: invariant
//! bounding boxes, exact extreme-cycle enumeration, cycle-generated
//! spectra, invariant closures, and periodic-zero scanning.

mod cycles;
mod dynbox;
mod scan;

pub use cycles::{
    dynamically_simple_spectrum, enumerate_extreme_cycles, invariant_closure, simplicity_probe,
    ClosureResult, CycleEnumeration, ExtremeCycle, SimplicityVerdict,
};
pub use dynbox::{attractor_box, AttractorBox};
pub use scan::{
    attractor_points, fundamental_grid, periodic_zero_scan, shift_box, PointStatus,
    ZeroScanEntry,
};

use num::rational::BigRational;
use thiserror::Error;

use crate::fourier::{FourierError, Mask};
use crate::latmath::{IntMatrix, LatticeError, RatMatrix, RatVec};
use crate::triple::{HadamardTriple, TripleError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Triple(#[from] Box<TripleError>),
    #[error("no axis-aligned invariant box exists (interval endpoint map is not contractive)")]
    NoInvariantBox,
    #[error("candidate enumeration exceeded cap {cap}")]
    CandidateCap { cap: usize },
    #[error("size cap {cap} exceeded while building level sets")]
    SizeCap { cap: usize },
    #[error("QMF identity violated: {0} extreme transitions from one point")]
    MultipleExtremeTransitions(usize),
}

impl From<TripleError> for DynamicsError {
    fn from(e: TripleError) -> Self {
        DynamicsError::Triple(Box::new(e))
    }
}

/// The maps `tau_l(x) = (R^T)^{-1}(x + l)` for `l in L`, over exact
/// rationals. The QMF identity `sum_l |m_B(tau_l x)|^2 = 1` holds at every
/// point because the underlying triple is verified.
pub struct TransitionSystem {
    triple: HadamardTriple,
    rt_inv: RatMatrix,
    mask: Mask,
}

impl TransitionSystem {
    pub fn new(triple: HadamardTriple) -> Result<Self, DynamicsError> {
        let rt_inv = triple.r().transpose().inverse()?;
        let mask = Mask::new(triple.b().clone());
        Ok(Self {
            triple,
            rt_inv,
            mask,
        })
    }

    pub fn triple(&self) -> &HadamardTriple {
        &self.triple
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn rt_inv(&self) -> &RatMatrix {
        &self.rt_inv
    }

    pub fn rt(&self) -> IntMatrix {
        self.triple.r().transpose()
    }

    /// `tau_l(x)` for the `l`-th frequency digit.
    pub fn tau(&self, ell_idx: usize, x: &RatVec) -> RatVec {
        let ell = &self.triple.l().vectors()[ell_idx];
        let shifted: RatVec = x
            .iter()
            .zip(ell)
            .map(|(xi, li)| xi + BigRational::from_integer(li.clone()))
            .collect();
        self.rt_inv.mat_vec(&shifted)
    }

    /// Applies the paper-convention word `tau_{l_1 ... l_m}` (last letter
    /// acts first).
    pub fn tau_word(&self, word: &[usize], x: &RatVec) -> RatVec {
        let mut y = x.clone();
        for &idx in word.iter().rev() {
            y = self.tau(idx, &y);
        }
        y
    }
}
