//! The mask `m_B(x) = (1/#B) sum_b e^{2 pi i <b, x>}` with exact modulus
//! classification at rational arguments.

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::cyclotomic::{rou_sum_is_zero, RouSum};
use crate::latmath::{DigitSet, RatVec};

/// Normalized exponential sum over a digit set. The value at 0 is exactly 1
/// and the function is `Z^d`-periodic since the digits are integral.
#[derive(Clone, Debug)]
pub struct Mask {
    digits: DigitSet,
    digits_f64: Vec<Vec<f64>>,
    max_norm: f64,
}

impl Mask {
    pub fn new(digits: DigitSet) -> Self {
        let digits_f64 = digits
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect())
            .collect();
        let max_norm = digits.max_norm_f64();
        Self {
            digits,
            digits_f64,
            max_norm,
        }
    }

    pub fn digits(&self) -> &DigitSet {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest Euclidean digit norm; drives the Lipschitz bound
    /// `|m_B(y) - 1| <= 2 pi max_b ||b|| ||y||`.
    pub fn max_digit_norm(&self) -> f64 {
        self.max_norm
    }

    /// Numeric evaluation at a real point.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let n = self.digits_f64.len() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for b in &self.digits_f64 {
            let phase: f64 = b.iter().zip(x).map(|(bi, xi)| bi * xi).sum();
            acc += Complex64::from_polar(1.0, std::f64::consts::TAU * phase.fract());
        }
        acc / n
    }

    /// Numeric evaluation at a rational point, with phases reduced mod 1
    /// exactly before rounding (keeps precision for huge arguments).
    pub fn eval_rational(&self, x: &RatVec) -> Complex64 {
        let n = self.digits.len() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for q in self.phases_mod_one(x) {
            acc += Complex64::from_polar(1.0, std::f64::consts::TAU * q.to_f64().unwrap());
        }
        acc / n
    }

    /// The phases `<b, x> mod 1` as exact rationals in `[0, 1)`.
    pub fn phases_mod_one(&self, x: &RatVec) -> Vec<BigRational> {
        self.digits
            .iter()
            .map(|b| {
                let dot: BigRational = b
                    .iter()
                    .zip(x)
                    .map(|(bi, xi)| BigRational::from_integer(bi.clone()) * xi)
                    .sum();
                let f = dot.floor();
                dot - f
            })
            .collect()
    }

    /// Exact unit-modulus test: since `0 in B`, `|m_B(x)| = 1` iff every
    /// `<b, x>` is an integer.
    pub fn unit_modulus_exact(&self, x: &RatVec) -> bool {
        self.phases_mod_one(x).iter().all(|q| q.is_zero())
    }

    /// Exact vanishing test at a rational point via the cyclotomic
    /// representation of the root-of-unity sum. `None` only when the phase
    /// denominator resists factorization.
    pub fn is_zero_exact(&self, x: &RatVec) -> Option<bool> {
        let phases = self.phases_mod_one(x);
        rou_sum_is_zero(&phases).map(|s| s == RouSum::Zero)
    }

    /// Exact integrality of a single digit phase; used by cycle walks.
    pub fn phase_is_integral(b: &crate::latmath::IntVec, x: &RatVec) -> bool {
        let dot: BigRational = b
            .iter()
            .zip(x)
            .map(|(bi, xi)| BigRational::from_integer(bi.clone()) * xi)
            .sum();
        dot.denom().is_one()
    }
}
