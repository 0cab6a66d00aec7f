//! Constructive machinery for spectral self-affine measure theory.
//!
//! The crate is organized around the pipeline that turns an expansive integer
//! matrix `R` and a digit set `B` into verified spectral data:
//!
//! * [`latmath`] — exact integer/rational lattice arithmetic: expansivity,
//!   residue systems, invariant lattices, duals, Hermite/Smith normal forms.
//! * [`cyclotomic`] — exact vanishing tests for sums of roots of unity, the
//!   engine behind every "certified exact" zero in the crate.
//! * [`fourier`] — the mask `m_B`, truncated-product evaluation of the
//!   Fourier transform of the invariant measure with certified error,
//!   Fourier matrices, and singular-value frame bounds.
//! * [`triple`] — Hadamard-triple verification, level-n product triples,
//!   unimodular conjugation, and quasi-product-form witnesses.
//! * [`dynamics`] — the transition system on frequency space: invariant
//!   boxes, exact extreme-cycle enumeration, cycle-generated spectra,
//!   invariant closures, and periodic-zero scans.
//! * [`spectrum`] — candidate spectra, orthogonality checks, lower-bound
//!   estimates for the completeness constant, Parseval identities on step
//!   functions, and spectrum completion by integer offsets.
//! * [`tower`] — almost-Parseval-frame towers and frame-bounded subset
//!   selection.

pub mod cyclotomic;
pub mod dynamics;
pub mod fourier;
pub mod latmath;
pub mod rng;
pub mod spectrum;
pub mod tower;
pub mod triple;
