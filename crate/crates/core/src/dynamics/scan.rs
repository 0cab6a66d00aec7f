//! Attractor point clouds and the periodic-zero-set scan.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::ToPrimitive;

use super::DynamicsError;
use crate::fourier::{MuHatEvaluator, ZeroScanOutcome};
use crate::latmath::{DigitSet, IntMatrix, IntVec, RatVec};

/// All depth-`d` images of the origin under the affine maps
/// `x -> R^{-1}(x + b)`: the points `sum_{k=1..depth} R^{-k} b_k` in
/// lexicographic word order (first letter most significant).
pub fn attractor_points(
    r: &IntMatrix,
    b: &DigitSet,
    depth: usize,
    cap: usize,
) -> Result<Vec<Vec<f64>>, DynamicsError> {
    let count = b
        .len()
        .checked_pow(depth as u32)
        .filter(|&c| c <= cap)
        .ok_or(DynamicsError::SizeCap { cap })?;
    let dim = r.dim();
    let a = r.inverse()?.to_f64();
    let digits: Vec<Vec<f64>> = b
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut word = vec![0usize; depth];
    loop {
        // Horner from the innermost letter: x = A(b_1 + A(b_2 + ...))
        let mut x = nalgebra::DVector::zeros(dim);
        for &idx in word.iter().rev() {
            for (xi, bi) in x.iter_mut().zip(&digits[idx]) {
                *xi += bi;
            }
            x = &a * x;
        }
        out.push(x.as_slice().to_vec());
        let mut pos = depth;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < digits.len() {
                break;
            }
            word[pos] = 0;
        }
    }
}

/// Per-point outcome of the periodic-zero scan.
#[derive(Clone, Debug)]
pub enum PointStatus {
    /// Every integer shift with `||k||_inf <= kmax` carries an exact
    /// vanishing certificate; the point is certified in the periodic zero
    /// set up to `kmax`.
    CertifiedInZ { certificates: Vec<(IntVec, usize)> },
    /// Some shift has no certificate. When `nonzero_certified` is set the
    /// transform provably does not vanish at that shift; otherwise the
    /// scan was merely inconclusive there.
    NoEvidence {
        failing_shift: IntVec,
        nonzero_certified: bool,
    },
}

#[derive(Clone, Debug)]
pub struct ZeroScanEntry {
    pub point: RatVec,
    pub status: PointStatus,
}

/// Scans grid points for membership in the periodic zero set, certified
/// exactly shift by shift up to `kmax`.
pub fn periodic_zero_scan(
    evaluator: &MuHatEvaluator,
    grid: &[RatVec],
    kmax: i64,
) -> Vec<ZeroScanEntry> {
    let dim = evaluator.rt_inverse().nrows();
    let shifts = shift_box(dim, kmax);
    grid.iter()
        .map(|point| {
            let mut certificates = Vec::with_capacity(shifts.len());
            let mut status = None;
            for k in &shifts {
                let shifted: RatVec = point
                    .iter()
                    .zip(k)
                    .map(|(p, ki)| p + BigRational::from_integer(ki.clone()))
                    .collect();
                match evaluator.zero_certificate(&shifted) {
                    ZeroScanOutcome::ZeroAt { level } => {
                        certificates.push((k.clone(), level));
                    }
                    outcome => {
                        status = Some(PointStatus::NoEvidence {
                            failing_shift: k.clone(),
                            nonzero_certified: outcome == ZeroScanOutcome::NonzeroCertified,
                        });
                        break;
                    }
                }
            }
            ZeroScanEntry {
                point: point.clone(),
                status: status.unwrap_or(PointStatus::CertifiedInZ { certificates }),
            }
        })
        .collect()
}

/// All integer shift vectors with `||k||_inf <= kmax`, odometer order.
pub fn shift_box(dim: usize, kmax: i64) -> Vec<IntVec> {
    let width = (2 * kmax + 1) as usize;
    let count = width.pow(dim as u32);
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0i64; dim];
    loop {
        out.push(idx.iter().map(|&i| BigInt::from(i - kmax)).collect());
        let mut pos = dim;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < width as i64 {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Rational grid over the fundamental domain `[0,1)^dim` with the given
/// denominator.
pub fn fundamental_grid(dim: usize, denominator: i64) -> Vec<RatVec> {
    assert!(denominator >= 1);
    let mut out = Vec::new();
    let mut idx = vec![0i64; dim];
    loop {
        out.push(
            idx.iter()
                .map(|&i| BigRational::new(BigInt::from(i), BigInt::from(denominator)))
                .collect(),
        );
        let mut pos = dim;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < denominator {
                break;
            }
            idx[pos] = 0;
        }
    }
}
