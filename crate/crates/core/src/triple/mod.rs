//! Hadamard triples: verification, level-n products, unimodular
//! conjugation, and quasi-product-form witnesses.

mod product;
mod quasi;

pub use product::{product_triple, ProductTriple};
pub use quasi::{
    residues_complete_mod, search_quasi_product, verify_quasi_product, QuasiCheck, QuasiDefect,
    QuasiProductWitness, SEARCH_CAP,
};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::ToPrimitive;
use thiserror::Error;

use crate::cyclotomic::{rou_sum_is_zero, RouSum};
use crate::fourier::{build_fourier_matrix, FourierError};
use crate::latmath::{
    is_expansive, residues_distinct, DigitSet, Expansivity, IntMatrix, IntVec, LatticeError,
    RatMatrix,
};
use crate::rng::Lcg;

/// Unitarity below this tolerance passes verification by default.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Largest #B for which every column pair gets an exact cyclotomic
/// orthogonality certificate.
const EXACT_PAIR_CAP: usize = 64;
/// Largest #B for which the full numeric Gram is computed.
const DENSE_CAP: usize = 256;
/// Pairs sampled when the matrix is too large for a dense Gram.
const SAMPLE_PAIRS: usize = 1500;

#[derive(Debug, Error)]
pub enum TripleError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not expansive ({0:?})")]
    NotExpansive(Expansivity),
    #[error("{which} is not a simple digit set (two digits congruent)")]
    NotSimpleDigitSet { which: &'static str },
    #[error("not a Hadamard triple: {0}")]
    NotHadamard(String),
    #[error("size {size} exceeds cap {cap}")]
    SizeCap { size: String, cap: usize },
    #[error("exact orthogonality certificate failed for base pair ({0}, {1})")]
    CertificateFailed(usize, usize),
    #[error("operation requires dimension >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(BigInt),
}

/// Expansive integer matrix with a simple digit set; the generator of the
/// invariant measure.
#[derive(Clone, Debug)]
pub struct AffinePair {
    r: IntMatrix,
    b: DigitSet,
}

impl AffinePair {
    pub fn new(r: IntMatrix, b: DigitSet) -> Result<Self, TripleError> {
        if b.dim() != r.dim() {
            return Err(TripleError::DimensionMismatch {
                expected: r.dim(),
                got: b.dim(),
            });
        }
        let verdict = is_expansive(&r);
        if !verdict.is_expansive() {
            return Err(TripleError::NotExpansive(verdict));
        }
        if !residues_distinct(&r, &b)? {
            return Err(TripleError::NotSimpleDigitSet { which: "B" });
        }
        Ok(Self { r, b })
    }

    pub fn r(&self) -> &IntMatrix {
        &self.r
    }

    pub fn b(&self) -> &DigitSet {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    /// Number of digits, `N = #B`.
    pub fn n_digits(&self) -> usize {
        self.b.len()
    }
}

/// A verified Hadamard triple `(R, B, L)`.
#[derive(Clone, Debug)]
pub struct HadamardTriple {
    pair: AffinePair,
    l: DigitSet,
}

impl HadamardTriple {
    /// Verifies and wraps; the report is returned alongside for echoing.
    pub fn new(
        r: IntMatrix,
        b: DigitSet,
        l: DigitSet,
        tol: f64,
    ) -> Result<(Self, TripleReport), TripleError> {
        let report = verify_triple(&r, &b, &l, tol)?;
        if !report.ok {
            return Err(TripleError::NotHadamard(report.describe()));
        }
        Ok((
            Self {
                pair: AffinePair::new(r, b)?,
                l,
            },
            report,
        ))
    }

    /// Wraps without re-running verification; for construction paths that
    /// carry their own exactness argument (products, conjugates).
    pub(crate) fn from_verified(pair: AffinePair, l: DigitSet) -> Self {
        Self { pair, l }
    }

    pub fn pair(&self) -> &AffinePair {
        &self.pair
    }

    pub fn r(&self) -> &IntMatrix {
        self.pair.r()
    }

    pub fn b(&self) -> &DigitSet {
        self.pair.b()
    }

    pub fn l(&self) -> &DigitSet {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn n_digits(&self) -> usize {
        self.pair.n_digits()
    }
}

/// How the unitarity of `H` was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitarityMethod {
    /// Full numeric Gram plus an exact cyclotomic certificate per pair.
    DenseAndExact,
    /// Full numeric Gram.
    Dense,
    /// Seeded sample of column pairs (matrix too large for a dense Gram).
    Sampled { pairs: usize },
    /// Exact product-structure argument on top of base-pair certificates.
    ProductStructure { base_pairs: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TripleDefect {
    SizeMismatch { b: usize, l: usize },
    NotExpansive(Expansivity),
    BNotSimple,
    LNotSimple,
    UnitarityDefect { defect: f64, tol: f64 },
}

/// Outcome of `verify_triple`: the verdict plus every defect found.
#[derive(Clone, Debug)]
pub struct TripleReport {
    pub ok: bool,
    pub defects: Vec<TripleDefect>,
    /// Numeric max-norm of `H* H - I` when it was computed.
    pub unitarity_defect: Option<f64>,
    pub unitarity_method: Option<UnitarityMethod>,
    /// True when every column pair carries an exact vanishing certificate.
    pub exact_certified: bool,
    pub expansivity: Expansivity,
}

impl TripleReport {
    pub fn describe(&self) -> String {
        if self.ok {
            "ok".to_string()
        } else {
            format!("{:?}", self.defects)
        }
    }
}

/// Exact orthogonality of the columns for digits `b`, `b'`:
/// `sum_l e^{2 pi i <R^{-1}(b - b'), l>} = 0`, decided cyclotomically.
fn pair_certificate(r_inv: &RatMatrix, bi: &IntVec, bj: &IntVec, l: &DigitSet) -> Option<bool> {
    let delta: IntVec = bi.iter().zip(bj).map(|(x, y)| x - y).collect();
    let scaled = r_inv.mat_int_vec(&delta);
    let phases: Vec<BigRational> = l
        .iter()
        .map(|ell| {
            let dot: BigRational = ell
                .iter()
                .zip(&scaled)
                .map(|(li, si)| BigRational::from_integer(li.clone()) * si)
                .sum();
            let f = dot.floor();
            dot - f
        })
        .collect();
    rou_sum_is_zero(&phases).map(|s| s == RouSum::Zero)
}

/// Sampled numeric unitarity defect for large matrices, deterministic under
/// the built-in seed. Uses exact integer phase arithmetic when the data
/// fits machine words, else falls back to rational phases.
fn sampled_defect(
    r: &IntMatrix,
    b: &DigitSet,
    l: &DigitSet,
    pairs: usize,
) -> Result<(f64, usize), TripleError> {
    let r_inv = r.inverse()?;
    let n = b.len();
    let mut rng = Lcg::new(0x5eed);
    let mut worst: f64 = 0.0;
    let mut sampled = 0;
    // fast path: phases as (adj(R) delta . l) / det over i128
    let det = r.det();
    let det_i = det.to_i128().filter(|d| *d != 0);
    let adj: Option<Vec<Vec<i128>>> = det_i.and_then(|_| {
        (0..r.dim())
            .map(|i| {
                (0..r.dim())
                    .map(|j| {
                        let e = r_inv.get(i, j) * BigRational::from_integer(det.clone());
                        if e.is_integer() {
                            e.to_integer().to_i128()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let to_i128_rows = |ds: &DigitSet| -> Option<Vec<Vec<i128>>> {
        ds.iter()
            .map(|v| v.iter().map(|x| x.to_i128()).collect())
            .collect()
    };
    let digits_i = to_i128_rows(b);
    let freqs_i = to_i128_rows(l);
    for _ in 0..pairs {
        let i = rng.next_index(n);
        let j = rng.next_index(n);
        if i == j {
            continue;
        }
        sampled += 1;
        let inner = match (&adj, &digits_i, &freqs_i, det_i) {
            (Some(adj), Some(digits), Some(freqs), Some(det)) => {
                let delta: Vec<i128> = digits[i]
                    .iter()
                    .zip(&digits[j])
                    .map(|(x, y)| x - y)
                    .collect();
                let scaled: Vec<i128> = adj
                    .iter()
                    .map(|row| row.iter().zip(&delta).map(|(a, d)| a * d).sum())
                    .collect();
                let mut acc = num::complex::Complex64::default();
                for ell in freqs {
                    let num: i128 = scaled.iter().zip(ell).map(|(s, li)| s * li).sum();
                    let frac = num.rem_euclid(det) as f64 / det as f64;
                    acc +=
                        num::complex::Complex64::from_polar(1.0, std::f64::consts::TAU * frac);
                }
                acc / n as f64
            }
            _ => {
                let delta: IntVec = b.vectors()[i]
                    .iter()
                    .zip(&b.vectors()[j])
                    .map(|(x, y)| x - y)
                    .collect();
                let scaled = r_inv.mat_int_vec(&delta);
                let mut acc = num::complex::Complex64::default();
                for ell in l.iter() {
                    let dot: BigRational = ell
                        .iter()
                        .zip(&scaled)
                        .map(|(li, si)| BigRational::from_integer(li.clone()) * si)
                        .sum();
                    let frac = (&dot - dot.floor()).to_f64().unwrap();
                    acc +=
                        num::complex::Complex64::from_polar(1.0, std::f64::consts::TAU * frac);
                }
                acc / n as f64
            }
        };
        worst = worst.max(inner.norm());
    }
    Ok((worst, sampled))
}

/// Full verification report for a candidate triple `(R, B, L)`.
///
/// Simple-digit checks are exact; unitarity is checked numerically at `tol`
/// and, for matrices up to 64 columns, certified exactly pair by pair.
pub fn verify_triple(
    r: &IntMatrix,
    b: &DigitSet,
    l: &DigitSet,
    tol: f64,
) -> Result<TripleReport, TripleError> {
    let d = r.dim();
    if b.dim() != d || l.dim() != d {
        return Err(TripleError::DimensionMismatch {
            expected: d,
            got: if b.dim() != d { b.dim() } else { l.dim() },
        });
    }
    let mut defects = Vec::new();
    let expansivity = is_expansive(r);
    if !expansivity.is_expansive() {
        defects.push(TripleDefect::NotExpansive(expansivity.clone()));
    }
    if b.len() != l.len() {
        defects.push(TripleDefect::SizeMismatch {
            b: b.len(),
            l: l.len(),
        });
    }
    let mut unitarity_defect = None;
    let mut unitarity_method = None;
    let mut exact_certified = false;
    if expansivity.is_expansive() {
        if !residues_distinct(r, b)? {
            defects.push(TripleDefect::BNotSimple);
        }
        if !residues_distinct(&r.transpose(), l)? {
            defects.push(TripleDefect::LNotSimple);
        }
        if b.len() == l.len() {
            let n = b.len();
            if n <= DENSE_CAP {
                let h = build_fourier_matrix(&r.inverse()?, b.vectors(), l.vectors())?;
                let defect = h.unitarity_defect()?;
                unitarity_defect = Some(defect);
                if defect >= tol {
                    defects.push(TripleDefect::UnitarityDefect { defect, tol });
                }
                if n <= EXACT_PAIR_CAP {
                    let r_inv = r.inverse()?;
                    exact_certified = (0..n).all(|i| {
                        (i + 1..n).all(|j| {
                            pair_certificate(&r_inv, &b.vectors()[i], &b.vectors()[j], l)
                                == Some(true)
                        })
                    });
                    unitarity_method = Some(UnitarityMethod::DenseAndExact);
                } else {
                    unitarity_method = Some(UnitarityMethod::Dense);
                }
            } else {
                let (defect, pairs) = sampled_defect(r, b, l, SAMPLE_PAIRS)?;
                unitarity_defect = Some(defect);
                unitarity_method = Some(UnitarityMethod::Sampled { pairs });
                if defect >= tol {
                    defects.push(TripleDefect::UnitarityDefect { defect, tol });
                }
            }
        }
    }
    Ok(TripleReport {
        ok: defects.is_empty(),
        defects,
        unitarity_defect,
        unitarity_method,
        exact_certified,
        expansivity,
    })
}

/// Conjugates a triple by a unimodular matrix `M`, producing
/// `(M R M^{-1}, M B, (M^T)^{-1} L)`; spectra correspond via `(M^T)^{-1}`.
pub fn conjugate_triple(
    t: &HadamardTriple,
    m: &IntMatrix,
) -> Result<(HadamardTriple, TripleReport), TripleError> {
    if m.dim() != t.dim() {
        return Err(TripleError::DimensionMismatch {
            expected: t.dim(),
            got: m.dim(),
        });
    }
    if !m.is_unimodular() {
        return Err(TripleError::NotUnimodular(m.det()));
    }
    let m_inv = exact_int_inverse(m)?;
    let new_r = m.mul(t.r()).mul(&m_inv);
    let mt_inv = m_inv.transpose();
    let new_b = DigitSet::new(t.dim(), t.b().iter().map(|v| m.mat_vec(v)).collect())?;
    let new_l = DigitSet::new(t.dim(), t.l().iter().map(|v| mt_inv.mat_vec(v)).collect())?;
    HadamardTriple::new(new_r, new_b, new_l, UNITARITY_TOL)
}

/// The level-n words `D + S D + ... + S^{n-1} D` of a digit set under a
/// scale matrix, in lexicographic word order (first letter most
/// significant).
pub fn expansion_words(digits: &DigitSet, scale: &IntMatrix, n: usize) -> Vec<IntVec> {
    product::expand_words(digits.vectors(), scale, n)
}

/// The level-n digit words `B_n = B + R B + ... + R^{n-1} B` in
/// lexicographic word order (first letter most significant).
pub fn level_digit_words(t: &HadamardTriple, n: usize) -> Vec<IntVec> {
    product::expand_words(t.b().vectors(), t.r(), n)
}

/// The level-n frequency words `Lambda_n = L + R^T L + ... + (R^T)^{n-1} L`
/// in the same word order.
pub fn level_frequency_words(t: &HadamardTriple, n: usize) -> Vec<IntVec> {
    product::expand_words(t.l().vectors(), &t.r().transpose(), n)
}

/// Integer inverse of a unimodular matrix.
pub(crate) fn exact_int_inverse(m: &IntMatrix) -> Result<IntMatrix, TripleError> {
    if !m.is_unimodular() {
        return Err(TripleError::NotUnimodular(m.det()));
    }
    let inv = m.inverse()?;
    let d = m.dim();
    let rows: Vec<IntVec> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let e = inv.get(i, j);
                    debug_assert!(e.is_integer());
                    e.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(IntMatrix::from_bigint_rows(rows)?)
}

/// Shared fixtures for tests across the crate.
#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Jorgensen–Pedersen scale-4 triple (4, {0,2}, {0,1}).
    pub fn jp() -> HadamardTriple {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        HadamardTriple::new(r, b, l, UNITARITY_TOL).unwrap().0
    }

    /// Lebesgue triple (2, {0,1}, {0,1}).
    pub fn lebesgue() -> HadamardTriple {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 1]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        HadamardTriple::new(r, b, l, UNITARITY_TOL).unwrap().0
    }

    /// The planar triple with a nonempty periodic zero set.
    pub fn planar_z() -> HadamardTriple {
        let r = IntMatrix::from_rows(&[vec![4, 0], vec![1, 2]]).unwrap();
        let b = DigitSet::from_rows(&[vec![0, 0], vec![0, 3], vec![1, 0], vec![1, 3]]).unwrap();
        let l = DigitSet::from_rows(&[vec![0, 0], vec![2, 0], vec![0, 1], vec![2, 1]]).unwrap();
        HadamardTriple::new(r, b, l, UNITARITY_TOL).unwrap().0
    }

    /// The 2x2 triple whose cycle-generated set is a proper subset of the
    /// spectrum (1/3)Z x Z.
    pub fn planar_not_simple() -> HadamardTriple {
        let r = IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        let b = DigitSet::from_rows(&[vec![0, 0], vec![3, 0], vec![0, 1], vec![3, 1]]).unwrap();
        let l = DigitSet::from_rows(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        HadamardTriple::new(r, b, l, UNITARITY_TOL).unwrap().0
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn jp_verifies_with_exact_certificates() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let report = verify_triple(&r, &b, &l, UNITARITY_TOL).unwrap();
        assert!(report.ok);
        assert!(report.exact_certified);
        assert!(report.unitarity_defect.unwrap() < 1e-12);
    }

    #[test]
    fn lebesgue_pair_is_a_triple() {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 1]).unwrap();
        let report = verify_triple(&r, &b, &b, UNITARITY_TOL).unwrap();
        assert!(report.ok && report.exact_certified);
    }

    #[test]
    fn planar_example_verifies() {
        let t = planar_z();
        assert_eq!(t.n_digits(), 4);
        let report = verify_triple(t.r(), t.b(), t.l(), UNITARITY_TOL).unwrap();
        assert!(report.ok && report.exact_certified);
    }

    #[test]
    fn non_triple_reports_defects() {
        let r = IntMatrix::from_rows(&[vec![3]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let report = verify_triple(&r, &b, &l, UNITARITY_TOL).unwrap();
        assert!(!report.ok);
        assert!(matches!(
            report.defects[..],
            [TripleDefect::UnitarityDefect { .. }]
        ));
        assert!(report.unitarity_defect.unwrap() >= 0.1);
    }

    #[test]
    fn size_mismatch_is_a_defect() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1, 2]).unwrap();
        let report = verify_triple(&r, &b, &l, UNITARITY_TOL).unwrap();
        assert!(!report.ok);
        assert!(report
            .defects
            .contains(&TripleDefect::SizeMismatch { b: 2, l: 3 }));
    }

    #[test]
    fn conjugation_by_identity_is_identity() {
        let t = jp();
        let (c, report) = conjugate_triple(&t, &IntMatrix::identity(1)).unwrap();
        assert!(report.ok);
        assert_eq!(c.r(), t.r());
        assert_eq!(c.b(), t.b());
        assert_eq!(c.l(), t.l());
    }

    #[test]
    fn conjugation_preserves_verification_and_det() {
        let t = planar_z();
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        let (c, report) = conjugate_triple(&t, &m).unwrap();
        assert!(report.ok);
        assert_eq!(c.r().det(), t.r().det());
    }

    #[test]
    fn conjugation_rejects_non_unimodular() {
        let t = planar_z();
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(matches!(
            conjugate_triple(&t, &m),
            Err(TripleError::NotUnimodular(_))
        ));
    }

    #[test]
    fn affine_pair_enforces_invariants() {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        assert!(matches!(
            AffinePair::new(r, b),
            Err(TripleError::NotSimpleDigitSet { .. })
        ));
        let r = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let b = DigitSet::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap();
        assert!(matches!(
            AffinePair::new(r, b),
            Err(TripleError::NotExpansive(_))
        ));
    }
}
