//! Certified expansivity: all eigenvalues strictly outside the unit circle.
//!
//! The exact route runs the Schur–Cohn recursion on the reversed
//! characteristic polynomial over arbitrary-precision integers. Degenerate
//! steps (equal constant/leading magnitudes) fall back to numeric
//! eigenvalues with a margin of 1e-9 around the unit circle, reported as
//! [`Expansivity::Indeterminate`] inside the margin — never silently true.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Margin around eigenvalue modulus 1 inside which the numeric fallback
/// refuses to decide.
pub const EXPANSIVITY_MARGIN: f64 = 1e-9;

/// Three-valued expansivity verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansivity {
    /// All eigenvalue moduli certified > 1.
    Expansive,
    /// Some eigenvalue modulus certified <= 1 (exactly, or numerically
    /// below 1 - margin).
    NotExpansive,
    /// An eigenvalue modulus lies within the numeric margin of 1 and the
    /// exact test was degenerate.
    Indeterminate { eigenvalue_modulus: f64 },
}

impl Expansivity {
    pub fn is_expansive(&self) -> bool {
        matches!(self, Expansivity::Expansive)
    }
}

enum SchurOutcome {
    AllInside,
    NotAllInside,
    Degenerate,
}

/// All roots of `q` (coefficients low-to-high, leading nonzero) strictly
/// inside the unit circle?
fn schur_all_inside(mut q: Vec<BigInt>) -> SchurOutcome {
    loop {
        let n = q.len() - 1;
        if n == 0 {
            return SchurOutcome::AllInside;
        }
        let a0 = q[0].abs();
        let an = q[n].abs();
        if a0 == an {
            return SchurOutcome::Degenerate;
        }
        if a0 > an {
            // |product of roots| = a0/an > 1 forces a root outside
            return SchurOutcome::NotAllInside;
        }
        // Cohn step: (a_n q - a_0 q*) / z, degree n-1, leading a_n^2 - a_0^2
        let lead = q[n].clone();
        let cst = q[0].clone();
        let next: Vec<BigInt> = (1..=n)
            .map(|k| &lead * &q[k] - &cst * &q[n - k])
            .collect();
        q = next;
    }
}

/// Decides whether every eigenvalue of `m` has modulus strictly greater
/// than one.
pub fn is_expansive(m: &IntMatrix) -> Expansivity {
    let p = m.char_poly();
    let d = m.dim();
    // |det| = product of eigenvalue moduli: 0 or 1 rules expansivity out
    let abs_det = p[0].abs();
    if abs_det.is_zero() || abs_det.is_one() {
        return Expansivity::NotExpansive;
    }
    // integer roots on the circle
    let at = |x: i64| -> BigInt {
        let mut acc = BigInt::zero();
        for c in p.iter().rev() {
            acc = acc * BigInt::from(x) + c;
        }
        acc
    };
    if at(1).is_zero() || at(-1).is_zero() {
        return Expansivity::NotExpansive;
    }
    // all |lambda| > 1  <=>  all roots of reversed(p) strictly inside
    let q: Vec<BigInt> = p.iter().rev().cloned().collect();
    debug_assert_eq!(q.len(), d + 1);
    match schur_all_inside(q) {
        SchurOutcome::AllInside => Expansivity::Expansive,
        SchurOutcome::NotAllInside => Expansivity::NotExpansive,
        SchurOutcome::Degenerate => {
            let eigs = m.to_f64().complex_eigenvalues();
            let min_mod = eigs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            if min_mod > 1.0 + EXPANSIVITY_MARGIN {
                Expansivity::Expansive
            } else if min_mod < 1.0 - EXPANSIVITY_MARGIN {
                Expansivity::NotExpansive
            } else {
                Expansivity::Indeterminate {
                    eigenvalue_modulus: min_mod,
                }
            }
        }
    }
}
