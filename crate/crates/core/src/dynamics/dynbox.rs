//! Axis-aligned boxes invariant under every transition map.
//!
//! The interval-hull map sends a box `[lo, hi]` to the componentwise hull
//! of its images under all `tau_l`; per coordinate the endpoints transform
//! affinely (the minimizing/maximizing digit offset does not depend on the
//! box), so the fixed box solves a rational linear system exactly. The
//! solution is verified invariant before it is returned, and it contains
//! the attractor `T(R^T, L)` because any invariant compact set does.

use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use super::DynamicsError;
use crate::latmath::{DigitSet, IntMatrix, RatMatrix, RatVec};

/// Closed box with exact rational endpoints, invariant under all `tau_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttractorBox {
    pub lo: RatVec,
    pub hi: RatVec,
}

impl AttractorBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &RatVec) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(xi, (lo, hi))| lo <= xi && xi <= hi)
    }

    pub fn contains_box(&self, other: &AttractorBox) -> bool {
        self.lo
            .iter()
            .zip(&other.lo)
            .all(|(a, b)| a <= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.lo.iter().map(|q| q.to_f64().unwrap()).collect(),
            self.hi.iter().map(|q| q.to_f64().unwrap()).collect(),
        )
    }
}

/// Exact interval image of `box` under `x -> A(x + l)`, per coordinate.
fn interval_image(a: &RatMatrix, ell: &[BigRational], b: &AttractorBox) -> AttractorBox {
    let d = a.nrows();
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for i in 0..d {
        let mut lo_i = BigRational::zero();
        let mut hi_i = BigRational::zero();
        for j in 0..d {
            let c = a.get(i, j);
            let off = c * &ell[j];
            if c.is_negative() {
                lo_i += c * &b.hi[j] + &off;
                hi_i += c * &b.lo[j] + &off;
            } else {
                lo_i += c * &b.lo[j] + &off;
                hi_i += c * &b.hi[j] + &off;
            }
        }
        lo.push(lo_i);
        hi.push(hi_i);
    }
    AttractorBox { lo, hi }
}

fn hull(mut boxes: impl Iterator<Item = AttractorBox>) -> AttractorBox {
    let first = boxes.next().expect("nonempty digit set");
    boxes.fold(first, |mut acc, b| {
        for (a, x) in acc.lo.iter_mut().zip(b.lo) {
            if x < *a {
                *a = x;
            }
        }
        for (a, x) in acc.hi.iter_mut().zip(b.hi) {
            if x > *a {
                *a = x;
            }
        }
        acc
    })
}

fn digit_rationals(l: &DigitSet) -> Vec<Vec<BigRational>> {
    l.iter()
        .map(|v| {
            v.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect()
}

fn hull_map(a: &RatMatrix, digits: &[Vec<BigRational>], b: &AttractorBox) -> AttractorBox {
    hull(digits.iter().map(|ell| interval_image(a, ell, b)))
}

/// The smallest box invariant under every `tau_l(x) = (R^T)^{-1}(x + l)`,
/// solved exactly and verified. Errors when the endpoint map is not
/// contractive (then no axis-aligned invariant box exists).
pub fn attractor_box(rt: &IntMatrix, l: &DigitSet) -> Result<AttractorBox, DynamicsError> {
    let d = rt.dim();
    let a = rt.to_rat().inverse()?;
    let digits = digit_rationals(l);
    // endpoint fixed-point system: u = M u + c with u = (lo, hi)
    // row i (lo): lo_i = cmin_i + sum_{a_ij>0} a_ij lo_j + sum_{a_ij<0} a_ij hi_j
    // row d+i (hi): symmetric with cmax_i
    let mut m = vec![vec![BigRational::zero(); 2 * d]; 2 * d];
    let mut c = vec![BigRational::zero(); 2 * d];
    for i in 0..d {
        let mut offsets: Vec<BigRational> = digits
            .iter()
            .map(|ell| (0..d).map(|j| a.get(i, j) * &ell[j]).sum())
            .collect();
        offsets.sort();
        c[i] = offsets.first().unwrap().clone();
        c[d + i] = offsets.last().unwrap().clone();
        for j in 0..d {
            let e = a.get(i, j);
            if e.is_zero() {
                continue;
            }
            if e.is_negative() {
                m[i][d + j] = e.clone();
                m[d + i][j] = e.clone();
            } else {
                m[i][j] = e.clone();
                m[d + i][d + j] = e.clone();
            }
        }
    }
    // solve (I - M) u = c
    let mut system = Vec::with_capacity(2 * d);
    for i in 0..2 * d {
        for j in 0..2 * d {
            let e = if i == j {
                BigRational::from_integer(1.into()) - &m[i][j]
            } else {
                -m[i][j].clone()
            };
            system.push(e);
        }
    }
    let sys = RatMatrix::from_entries(2 * d, 2 * d, system);
    let u = sys.solve(&c).map_err(|_| DynamicsError::NoInvariantBox)?;
    let solved = AttractorBox {
        lo: u[..d].to_vec(),
        hi: u[d..].to_vec(),
    };
    if solved
        .lo
        .iter()
        .zip(&solved.hi)
        .any(|(lo, hi)| lo > hi)
    {
        return Err(DynamicsError::NoInvariantBox);
    }
    // exact invariance check: tau_l(box) inside box for every l
    for ell in &digits {
        let image = interval_image(&a, ell, &solved);
        if !solved.contains_box(&image) {
            return Err(DynamicsError::NoInvariantBox);
        }
    }
    debug_assert_eq!(hull_map(&a, &digits, &solved), solved);
    Ok(solved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn jp_frequency_box_is_zero_to_third() {
        let rt = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let b = attractor_box(&rt, &l).unwrap();
        assert_eq!(b.lo, vec![rat(0, 1)]);
        assert_eq!(b.hi, vec![rat(1, 3)]);
    }

    #[test]
    fn dyadic_box_is_unit_interval() {
        let rt = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let l = DigitSet::from_scalars(&[0, 1]).unwrap();
        let b = attractor_box(&rt, &l).unwrap();
        assert_eq!(b.lo, vec![rat(0, 1)]);
        assert_eq!(b.hi, vec![rat(1, 1)]);
    }

    #[test]
    fn planar_box_is_the_papers_rectangle() {
        // R = [[2,1],[0,2]], L = {0,1}^2: the invariant rectangle is
        // [0,1] x [-1,1]
        let rt = IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]])
            .unwrap()
            .transpose();
        let l = DigitSet::from_rows(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let b = attractor_box(&rt, &l).unwrap();
        let expected = AttractorBox {
            lo: vec![rat(0, 1), rat(-1, 1)],
            hi: vec![rat(1, 1), rat(1, 1)],
        };
        assert!(b.contains_box(&expected));
        assert!(expected.contains_box(&b));
    }

    #[test]
    fn twin_dragon_has_no_axis_aligned_box() {
        // R = [[1,-1],[1,1]] is expansive but |A| has spectral radius 1
        let rt = IntMatrix::from_rows(&[vec![1, -1], vec![1, 1]]).unwrap();
        let l = DigitSet::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap();
        assert!(matches!(
            attractor_box(&rt, &l),
            Err(DynamicsError::NoInvariantBox)
        ));
    }
}
