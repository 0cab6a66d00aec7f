//! Dense exact matrices and integer vectors, sized for small dimensions.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use super::LatticeError;

/// Exact integer vector.
pub type IntVec = Vec<BigInt>;
/// Exact rational vector.
pub type RatVec = Vec<BigRational>;

/// Integer vector from machine words.
pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Sorted copy of a vector list; handy for set comparisons in tests and
/// reports.
pub fn int_sorted(vs: &[IntVec]) -> Vec<IntVec> {
    let mut out = vs.to_vec();
    out.sort();
    out
}

pub(crate) fn rat_vec(v: &IntVec) -> RatVec {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

pub(crate) fn rat_vec_to_f64(v: &RatVec) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

pub(crate) fn int_dot(a: &IntVec, b: &IntVec) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `<a, b>` with `a` integer and `b` rational.
pub(crate) fn mixed_dot(a: &IntVec, b: &RatVec) -> BigRational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
        .sum()
}

/// Square integer matrix with exact entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LatticeError::BadDigitSet("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(LatticeError::DimensionMismatch {
                expected: dim,
                got: rows.iter().map(|r| r.len()).find(|&l| l != dim).unwrap_or(0),
            });
        }
        Ok(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        };
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<IntVec> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![BigInt::zero(); self.dim * self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[j * self.dim + i] = self.get(i, j).clone();
            }
        }
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        Self { dim: d, entries }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mat_vec(&self, v: &IntVec) -> IntVec {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j) * &v[j])
                    .sum::<BigInt>()
            })
            .collect()
    }

    /// Exact determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut m: Vec<Vec<BigInt>> = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..d).find(|&i| !m[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev; // exact by Bareiss
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[d - 1][d - 1].clone()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exact rational inverse. Errors on singular input.
    pub fn inverse(&self) -> Result<RatMatrix, LatticeError> {
        RatMatrix::from_int(self).inverse()
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_int(self)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }

    /// Coefficients of the characteristic polynomial `det(xI - M)`,
    /// low degree first, monic. Faddeev–LeVerrier; all divisions exact.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let d = self.dim;
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        let mut mk = self.clone();
        for k in 1..=d {
            let c = -mk.trace() / BigInt::from(k as i64);
            coeffs[d - k] = c.clone();
            if k < d {
                let mut shifted = mk;
                for i in 0..d {
                    let idx = i * d + i;
                    shifted.entries[idx] += &c;
                }
                mk = self.mul(&shifted);
            }
        }
        coeffs
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Rectangular exact rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_int(m: &IntMatrix) -> Self {
        Self {
            rows: m.dim,
            cols: m.dim,
            entries: m
                .entries
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigRational::one();
        }
        Self {
            rows: dim,
            cols: dim,
            entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut entries = vec![BigRational::zero(); self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut entries = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Self {
            rows: self.rows,
            cols: other.cols,
            entries,
        }
    }

    pub fn mat_vec(&self, v: &RatVec) -> RatVec {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mat_int_vec(&self, v: &IntVec) -> RatVec {
        self.mat_vec(&rat_vec(v))
    }

    /// Gauss–Jordan inverse over the rationals.
    pub fn inverse(&self) -> Result<RatMatrix, LatticeError> {
        assert_eq!(self.rows, self.cols);
        let d = self.rows;
        let mut a: Vec<RatVec> = (0..d)
            .map(|i| {
                let mut row: RatVec = (0..d).map(|j| self.get(i, j).clone()).collect();
                let mut aug = vec![BigRational::zero(); d];
                aug[i] = BigRational::one();
                row.extend(aug);
                row
            })
            .collect();
        for col in 0..d {
            let Some(p) = (col..d).find(|&i| !a[i][col].is_zero()) else {
                return Err(LatticeError::Singular);
            };
            a.swap(col, p);
            let pivot = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= &pivot;
            }
            for i in 0..d {
                if i != col && !a[i][col].is_zero() {
                    let factor = a[i][col].clone();
                    for j in 0..2 * d {
                        let sub = &factor * &a[col][j];
                        a[i][j] -= sub;
                    }
                }
            }
        }
        let entries = a
            .into_iter()
            .flat_map(|row| row.into_iter().skip(d).collect::<Vec<_>>())
            .collect();
        Ok(RatMatrix {
            rows: d,
            cols: d,
            entries,
        })
    }

    /// Solves `A x = b` exactly. Errors on singular `A`.
    pub fn solve(&self, b: &RatVec) -> Result<RatVec, LatticeError> {
        Ok(self.inverse()?.mat_vec(b))
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).to_f64().unwrap_or(f64::NAN)
        })
    }
}

/// Finite set of integer digit vectors: pairwise distinct, containing zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSet {
    dim: usize,
    vectors: Vec<IntVec>,
}

impl DigitSet {
    pub fn new(dim: usize, vectors: Vec<IntVec>) -> Result<Self, LatticeError> {
        if vectors.is_empty() {
            return Err(LatticeError::BadDigitSet("empty digit set".into()));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let mut sorted = vectors.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(LatticeError::BadDigitSet("digits not pairwise distinct".into()));
        }
        let zero = vec![BigInt::zero(); dim];
        if !vectors.contains(&zero) {
            return Err(LatticeError::BadDigitSet("digit set must contain 0".into()));
        }
        Ok(Self { dim, vectors })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        Self::new(dim, rows.iter().map(|r| int_vec(r)).collect())
    }

    /// One-dimensional digit set from scalars.
    pub fn from_scalars(digits: &[i64]) -> Result<Self, LatticeError> {
        Self::from_rows(&digits.iter().map(|&d| vec![d]).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[IntVec] {
        &self.vectors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IntVec> {
        self.vectors.iter()
    }

    /// Largest Euclidean norm over the digits, rounded up slightly.
    pub fn max_norm_f64(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| {
                        let f = x.to_f64().unwrap_or(f64::NAN);
                        f * f
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
            * (1.0 + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let r = IntMatrix::from_rows(&[vec![4, 0], vec![1, 2]]).unwrap();
        assert_eq!(r.det(), BigInt::from(8));
        let inv = r.inverse().unwrap();
        let prod = RatMatrix::from_int(&r).mul(&inv);
        assert_eq!(prod, RatMatrix::identity(2));
    }

    #[test]
    fn det_singular_and_sign() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.det(), BigInt::zero());
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.det(), BigInt::from(-1));
    }

    #[test]
    fn char_poly_matches_det_and_trace() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        // x^2 - 4x + 4
        assert_eq!(
            m.char_poly(),
            vec![BigInt::from(4), BigInt::from(-4), BigInt::from(1)]
        );
        let m3 = IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 3, 1], vec![1, 0, 1]]).unwrap();
        let p = m3.char_poly();
        // constant term = (-1)^d det, next-to-leading = -trace
        assert_eq!(p[0], -m3.det());
        assert_eq!(p[2], -m3.trace());
    }

    #[test]
    fn digit_set_invariants() {
        assert!(DigitSet::from_scalars(&[0, 2]).is_ok());
        assert!(DigitSet::from_scalars(&[1, 2]).is_err()); // no zero
        assert!(DigitSet::from_scalars(&[0, 2, 2]).is_err()); // duplicate
    }
}
