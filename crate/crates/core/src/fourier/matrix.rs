//! Fourier matrices over digit/frequency pairs and their frame bounds.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::ToPrimitive;

use super::mask::Mask;
use super::FourierError;
use crate::latmath::{DigitSet, IntMatrix, IntVec, RatMatrix};

/// Squared singular-value extremes of a Fourier matrix: the optimal
/// constants in `lower * ||w||^2 <= ||F w||^2 <= upper * ||w||^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// The matrix `(1/sqrt(#digits)) [e^{2 pi i <scale b, l>}]` with rows
/// indexed by frequencies and columns by digits. Entries are built from
/// exact rational phases reduced mod 1, so they stay accurate for huge
/// digit/frequency values.
#[derive(Clone, Debug)]
pub struct FourierMatrix {
    freqs: Vec<IntVec>,
    digits: Vec<IntVec>,
    data: DMatrix<Complex64>,
}

/// Builds the Fourier matrix for the given rational scale matrix.
/// Row and column order follow the input order.
pub fn build_fourier_matrix(
    scale: &RatMatrix,
    digits: &[IntVec],
    freqs: &[IntVec],
) -> Result<FourierMatrix, FourierError> {
    if digits.is_empty() || freqs.is_empty() {
        return Err(FourierError::EmptyMatrix);
    }
    let dim = scale.nrows();
    for v in digits.iter().chain(freqs) {
        if v.len() != dim {
            return Err(FourierError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let norm = 1.0 / (digits.len() as f64).sqrt();
    // scale each digit once, exactly
    let scaled: Vec<Vec<BigRational>> = digits
        .iter()
        .map(|b| {
            let rb: Vec<BigRational> = b
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            scale.mat_vec(&rb)
        })
        .collect();
    let mut data = DMatrix::from_element(freqs.len(), digits.len(), Complex64::default());
    for (col, sb) in scaled.iter().enumerate() {
        for (row, l) in freqs.iter().enumerate() {
            let dot: BigRational = sb
                .iter()
                .zip(l)
                .map(|(s, li)| s * BigRational::from_integer(li.clone()))
                .sum();
            let frac = (&dot - dot.floor()).to_f64().unwrap();
            data[(row, col)] =
                Complex64::from_polar(norm, std::f64::consts::TAU * frac);
        }
    }
    Ok(FourierMatrix {
        freqs: freqs.to_vec(),
        digits: digits.to_vec(),
        data,
    })
}

impl FourierMatrix {
    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn freqs(&self) -> &[IntVec] {
        &self.freqs
    }

    pub fn digits(&self) -> &[IntVec] {
        &self.digits
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Entry-wise conjugate (swaps the sign convention in the exponent).
    pub fn conjugated(&self) -> Self {
        Self {
            freqs: self.freqs.clone(),
            digits: self.digits.clone(),
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn mat_vec(&self, w: &[Complex64]) -> Vec<Complex64> {
        let v = DVector::from_column_slice(w);
        (&self.data * v).as_slice().to_vec()
    }

    /// Extreme eigenvalues of the Gram matrix `F* F`, with an eigenpair
    /// residual check at 1e-10.
    pub fn frame_bounds(&self) -> Result<FrameBounds, FourierError> {
        // When rows < cols the Gram on the column side is rank deficient:
        // the lower frame bound is 0 and the upper bound equals the largest
        // eigenvalue of the smaller row-side Gram.
        let (rows, cols) = (self.data.nrows(), self.data.ncols());
        let use_row_side = rows < cols;
        let gram = if use_row_side {
            &self.data * self.data.adjoint()
        } else {
            self.data.adjoint() * &self.data
        };
        let (lower, upper) = gram_extremes(&gram)?;
        Ok(FrameBounds {
            lower: if use_row_side { 0.0 } else { lower.max(0.0) },
            upper,
        })
    }

    /// Max-norm of `F* F - I`; requires a square matrix.
    pub fn unitarity_defect(&self) -> Result<f64, FourierError> {
        if self.data.nrows() != self.data.ncols() {
            return Err(FourierError::NotSquare {
                rows: self.data.nrows(),
                cols: self.data.ncols(),
            });
        }
        let gram = self.data.adjoint() * &self.data;
        let mut defect: f64 = 0.0;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                };
                defect = defect.max((gram[(i, j)] - target).norm());
            }
        }
        Ok(defect)
    }
}

/// Extreme eigenvalues of a Hermitian Gram matrix with residual checks.
pub(crate) fn gram_extremes(gram: &DMatrix<Complex64>) -> Result<(f64, f64), FourierError> {
    let eigen = gram.clone().symmetric_eigen();
    let mut min_i = 0;
    let mut max_i = 0;
    for i in 0..eigen.eigenvalues.len() {
        if eigen.eigenvalues[i] < eigen.eigenvalues[min_i] {
            min_i = i;
        }
        if eigen.eigenvalues[i] > eigen.eigenvalues[max_i] {
            max_i = i;
        }
    }
    for &i in &[min_i, max_i] {
        let v = eigen.eigenvectors.column(i);
        let residual = (gram * v - v * Complex64::new(eigen.eigenvalues[i], 0.0)).norm();
        if residual > 1e-10 * v.norm().max(1.0) {
            return Err(FourierError::EigenResidual { residual });
        }
    }
    Ok((eigen.eigenvalues[min_i], eigen.eigenvalues[max_i]))
}

/// The quadrature-mirror residual `|sum_l |m_B((R^T)^{-1}(x + l))|^2 - 1|`;
/// vanishes identically for Hadamard triples.
pub fn qmf_residual(
    r: &IntMatrix,
    b: &DigitSet,
    l: &DigitSet,
    x: &[f64],
) -> Result<f64, FourierError> {
    let d = r.dim();
    if b.dim() != d || l.dim() != d || x.len() != d {
        return Err(FourierError::DimensionMismatch {
            expected: d,
            got: b.dim().max(l.dim()).max(x.len()),
        });
    }
    let a = r.transpose().inverse()?.to_f64();
    let mask = Mask::new(b.clone());
    let mut total = 0.0;
    for ell in l.iter() {
        let shifted: Vec<f64> = x
            .iter()
            .zip(ell)
            .map(|(xi, li)| xi + li.to_f64().unwrap())
            .collect();
        let y = &a * DVector::from_column_slice(&shifted);
        total += mask.eval(y.as_slice()).norm_sqr();
    }
    Ok((total - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp_matrix() -> FourierMatrix {
        // H = (1/sqrt 2) [[1, 1], [1, -1]] for (4, {0,2}, {0,1})
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let scale = r.inverse().unwrap();
        let digits = DigitSet::from_scalars(&[0, 2]).unwrap();
        let freqs = DigitSet::from_scalars(&[0, 1]).unwrap();
        build_fourier_matrix(&scale, digits.vectors(), freqs.vectors()).unwrap()
    }

    #[test]
    fn jp_matrix_entries() {
        let h = jp_matrix();
        let s = 1.0 / 2.0_f64.sqrt();
        let expect = [[s, s], [s, -s]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (h.data()[(i, j)] - Complex64::new(expect[i][j], 0.0)).norm() < 1e-15,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn jp_matrix_is_unitary() {
        let h = jp_matrix();
        assert!(h.unitarity_defect().unwrap() < 1e-15);
        let fb = h.frame_bounds().unwrap();
        assert!((fb.lower - 1.0).abs() < 1e-12 && (fb.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_one_by_one() {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let scale = r.inverse().unwrap();
        let digits = DigitSet::from_scalars(&[0]).unwrap();
        let h = build_fourier_matrix(&scale, digits.vectors(), digits.vectors()).unwrap();
        assert!(h.unitarity_defect().unwrap() == 0.0);
    }

    #[test]
    fn non_triple_has_visible_defect() {
        // (3, {0,2}, {0,1}) is not a Hadamard triple
        let r = IntMatrix::from_rows(&[vec![3]]).unwrap();
        let scale = r.inverse().unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let h = build_fourier_matrix(&scale, b.vectors(), l.vectors()).unwrap();
        assert!(h.unitarity_defect().unwrap() >= 0.1);
    }

    #[test]
    fn middle_third_level_one_bounds() {
        // oracle: 2x2 Gram with off-diagonal modulus 1/2 has eigenvalues
        // 1 -+ 1/2 (quadratic formula, independent of the eigen solver)
        let r = IntMatrix::from_rows(&[vec![3]]).unwrap();
        let scale = r.inverse().unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        for freqs in [[0i64, 1], [0, 2], [1, 2]] {
            let l: Vec<IntVec> = freqs
                .iter()
                .map(|&f| vec![num::BigInt::from(f)])
                .collect();
            let h = build_fourier_matrix(&scale, b.vectors(), &l).unwrap();
            let fb = h.frame_bounds().unwrap();
            assert!((fb.lower - 0.5).abs() < 1e-12, "{freqs:?}: {fb:?}");
            assert!((fb.upper - 1.5).abs() < 1e-12, "{freqs:?}: {fb:?}");
        }
    }

    #[test]
    fn wide_matrix_lower_bound_is_zero() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let scale = r.inverse().unwrap();
        let b = DigitSet::from_scalars(&[0, 1, 2, 3]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let h = build_fourier_matrix(&scale, b.vectors(), l.vectors()).unwrap();
        let fb = h.frame_bounds().unwrap();
        assert_eq!(fb.lower, 0.0);
        assert!(fb.upper > 0.0);
    }

    #[test]
    fn qmf_residual_vanishes_for_jp() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        assert!(qmf_residual(&r, &b, &l, &[0.0]).unwrap() < 1e-12);
        assert!(qmf_residual(&r, &b, &l, &[0.37]).unwrap() < 1e-12);
    }

    #[test]
    fn qmf_residual_positive_for_non_triple() {
        let r = IntMatrix::from_rows(&[vec![3]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        assert!(qmf_residual(&r, &b, &l, &[0.0]).unwrap() > 1e-3);
    }
}
