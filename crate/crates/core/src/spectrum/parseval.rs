//! The finite-dimensional Parseval identity on level-n step functions.
//!
//! For `f = sum_b w_b 1_{tau_b(T)}` over the level-n digit words, the
//! moments against exponentials have the closed form
//! `(1/N^n) muhat((R^T)^{-n} lambda) sum_b w_b e^{-2 pi i <R^{-n} b, lambda>}`,
//! so `sum_{lambda in Lambda_n} |moment|^2` can be computed two ways: a
//! direct per-frequency loop, and through the level-n Fourier matrix. The
//! identity defect is the difference; the sandwich compares the sum with
//! `||f||^2 = (1/N^n) ||w||^2`.

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::ToPrimitive;

use super::{canonical_levels, delta_estimate, SpectrumError};
use crate::fourier::{build_fourier_matrix, FourierMatrix, MuHatEvaluator, RationalMuHat};
use crate::latmath::{IntVec, RatMatrix};
use crate::triple::HadamardTriple;

/// Weights for a level-n step function, indexed by the digit words of
/// `B_n` in lexicographic word order.
#[derive(Clone, Debug)]
pub struct StepFunction {
    pub level: usize,
    pub weights: Vec<Complex64>,
}

impl StepFunction {
    /// `||f||^2 = (1/N^n) sum |w_b|^2`, exactly per the level structure.
    pub fn norm_sq(&self, n_digits: usize) -> f64 {
        let scale = (n_digits as f64).powi(-(self.level as i32));
        scale * self.weights.iter().map(|w| w.norm_sqr()).sum::<f64>()
    }
}

#[derive(Clone, Debug)]
pub struct ParsevalReport {
    /// `|direct sum - matrix-route sum|`.
    pub identity_defect: f64,
    /// `sum_lambda |moment|^2 / ||f||^2`.
    pub sum_ratio: f64,
    /// Completeness-constant estimate at this depth (sandwich lower edge).
    pub lower: f64,
    /// Sandwich upper edge is always 1; true when `sum_ratio <= 1 + 1e-9`.
    pub upper_ok: bool,
    pub norm_sq: f64,
}

/// Prebuilt level data shared by every step function at a fixed level.
pub struct ParsevalContext {
    n: usize,
    n_digits: usize,
    digits: Vec<IntVec>,
    freqs: Vec<IntVec>,
    /// Transform values at the pulled-back frequencies, in `freqs` order.
    muhat: Vec<Complex64>,
    /// `H_n` with the `e^{-2 pi i ...}` sign convention.
    matrix: FourierMatrix,
    /// Exact `R^{-n}` applied per digit, for the direct route.
    scaled_digits: Vec<Vec<BigRational>>,
    /// Completeness estimate at depth `n` for the sandwich lower edge.
    pub delta_lower: f64,
}

impl ParsevalContext {
    pub fn new(
        ev: &MuHatEvaluator,
        t: &HadamardTriple,
        n: usize,
        cap: usize,
    ) -> Result<Self, SpectrumError> {
        assert!(n >= 1);
        let size = t
            .n_digits()
            .checked_pow(n as u32)
            .filter(|&s| s <= cap)
            .ok_or(SpectrumError::SizeCap { cap })?;
        let digits = crate::triple::level_digit_words(t, n);
        let freqs = crate::triple::level_frequency_words(t, n);
        debug_assert_eq!(digits.len(), size);
        let scale: RatMatrix = {
            let inv = t.r().inverse()?;
            let mut acc = RatMatrix::identity(t.dim());
            for _ in 0..n {
                acc = acc.mul(&inv);
            }
            acc
        };
        let matrix = build_fourier_matrix(&scale, &digits, &freqs)?.conjugated();
        let mut muhat = Vec::with_capacity(freqs.len());
        for lam in &freqs {
            let as_rat: Vec<BigRational> = lam
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let pulled = ev.pullback(&as_rat, n);
            let value = match ev.eval_rational(&pulled, 1e-12)? {
                RationalMuHat::ExactZero { .. } => Complex64::default(),
                RationalMuHat::Numeric { value, .. } => value.value,
            };
            muhat.push(value);
        }
        let scaled_digits: Vec<Vec<BigRational>> = digits
            .iter()
            .map(|b| {
                let rb: Vec<BigRational> = b
                    .iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect();
                scale.mat_vec(&rb)
            })
            .collect();
        let cand = canonical_levels(t, n, cap)?;
        let delta_lower = delta_estimate(ev, &cand, n, 1e-10)?.value;
        Ok(Self {
            n,
            n_digits: t.n_digits(),
            digits,
            freqs,
            muhat,
            matrix,
            scaled_digits,
            delta_lower,
        })
    }

    pub fn level_size(&self) -> usize {
        self.digits.len()
    }

    pub fn freqs(&self) -> &[IntVec] {
        &self.freqs
    }

    /// Both evaluation routes and their defect for one step function.
    pub fn defect(&self, f: &StepFunction) -> Result<ParsevalReport, SpectrumError> {
        if f.weights.len() != self.digits.len() {
            return Err(SpectrumError::WeightCount {
                expected: self.digits.len(),
                got: f.weights.len(),
            });
        }
        let n_pow = (self.n_digits as f64).powi(self.n as i32);
        // direct route: per-frequency moment loop
        let mut direct = 0.0;
        for (li, lam) in self.freqs.iter().enumerate() {
            let mut s = Complex64::default();
            for (bi, sb) in self.scaled_digits.iter().enumerate() {
                let dot: BigRational = sb
                    .iter()
                    .zip(lam)
                    .map(|(x, l)| x * BigRational::from_integer(l.clone()))
                    .sum();
                let frac = (&dot - dot.floor()).to_f64().unwrap();
                s += f.weights[bi]
                    * Complex64::from_polar(1.0, -std::f64::consts::TAU * frac);
            }
            let moment = self.muhat[li] * s / n_pow;
            direct += moment.norm_sqr();
        }
        // matrix route: (1/N^n) sum |muhat|^2 |(H_n w)_lambda|^2
        let hw = self.matrix.mat_vec(&f.weights);
        let mut via_matrix = 0.0;
        for (li, v) in hw.iter().enumerate() {
            via_matrix += self.muhat[li].norm_sqr() * v.norm_sqr();
        }
        via_matrix /= n_pow;
        let norm_sq = f.norm_sq(self.n_digits);
        let ratio = direct / norm_sq;
        Ok(ParsevalReport {
            identity_defect: (direct - via_matrix).abs(),
            sum_ratio: ratio,
            lower: self.delta_lower,
            upper_ok: ratio <= 1.0 + 1e-9,
            norm_sq,
        })
    }
}

/// One-call convenience wrapper.
pub fn parseval_defect(
    ev: &MuHatEvaluator,
    t: &HadamardTriple,
    n: usize,
    f: &StepFunction,
    cap: usize,
) -> Result<ParsevalReport, SpectrumError> {
    ParsevalContext::new(ev, t, n, cap)?.defect(f)
}
