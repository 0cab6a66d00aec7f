//! Residue systems modulo `R Z^d`, exactly.

use num::bigint::BigInt;
use num::traits::{Signed, ToPrimitive, Zero};

use super::matrix::{rat_vec, DigitSet, IntMatrix, IntVec, RatMatrix};
use super::snf::smith_normal_form;
use super::LatticeError;

/// Hard cap on the size of an enumerated residue system.
const RESIDUE_CAP: usize = 1 << 20;

/// True iff no two distinct digits are congruent modulo `R Z^d`,
/// decided by exact rational solves.
pub fn residues_distinct(r: &IntMatrix, b: &DigitSet) -> Result<bool, LatticeError> {
    if b.dim() != r.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: r.dim(),
            got: b.dim(),
        });
    }
    let inv = r.inverse()?;
    let vs = b.vectors();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let diff: IntVec = vs[i].iter().zip(&vs[j]).map(|(x, y)| x - y).collect();
            let x = inv.mat_int_vec(&diff);
            if x.iter().all(|c| c.is_integer()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Canonical representative of `x` modulo `R Z^d`, landing in the
/// fundamental parallelepiped `R [0,1)^d`.
pub fn reduce_mod(r: &IntMatrix, r_inv: &RatMatrix, x: &IntVec) -> IntVec {
    let coords = r_inv.mat_vec(&rat_vec(x));
    let floors: IntVec = coords.iter().map(|c| c.floor().to_integer()).collect();
    let shift = r.mat_vec(&floors);
    x.iter().zip(&shift).map(|(a, s)| a - s).collect()
}

/// A complete set of representatives modulo `R Z^d`: exactly `|det R|`
/// vectors, pairwise non-congruent, each reduced to the fundamental
/// parallelepiped, in lexicographic order.
pub fn complete_residues(r: &IntMatrix) -> Result<Vec<IntVec>, LatticeError> {
    let det = r.det();
    if det.is_zero() {
        return Err(LatticeError::Singular);
    }
    let count = det
        .abs()
        .to_usize()
        .filter(|&c| c <= RESIDUE_CAP)
        .ok_or(LatticeError::BadDigitSet(format!(
            "residue system too large: |det| = {}",
            det.abs()
        )))?;
    let snf = smith_normal_form(r)?;
    let u_inv_rat = snf.u.inverse()?;
    // U is unimodular, so U^{-1} is integral
    let u_inv_rows: Vec<IntVec> = (0..r.dim())
        .map(|i| {
            (0..r.dim())
                .map(|j| {
                    let e = u_inv_rat.get(i, j);
                    debug_assert!(e.is_integer());
                    e.to_integer()
                })
                .collect()
        })
        .collect();
    let r_inv = r.inverse()?;
    let d = r.dim();
    let mut reps = Vec::with_capacity(count);
    let mut y = vec![BigInt::zero(); d];
    loop {
        // x = U^{-1} y, reduced
        let x: IntVec = (0..d)
            .map(|i| y.iter().zip(&u_inv_rows[i]).map(|(a, b)| a * b).sum())
            .collect();
        reps.push(reduce_mod(r, &r_inv, &x));
        // odometer over prod [0, s_i)
        let mut carry = true;
        for i in 0..d {
            if !carry {
                break;
            }
            y[i] += 1;
            if y[i] < snf.diag[i] {
                carry = false;
            } else {
                y[i] = BigInt::zero();
            }
        }
        if carry {
            break;
        }
    }
    debug_assert_eq!(reps.len(), count);
    reps.sort();
    // canonical reduced forms are distinct iff the residues are
    if reps.windows(2).any(|w| w[0] == w[1]) {
        return Err(LatticeError::BadDigitSet(
            "residue enumeration produced a collision".into(),
        ));
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::matrix::int_vec;

    #[test]
    fn jp_digits_are_distinct_mod_four() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        assert!(residues_distinct(&r, &b).unwrap());
    }

    #[test]
    fn zero_and_two_collide_mod_two() {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        assert!(!residues_distinct(&r, &b).unwrap());
    }

    #[test]
    fn example53_digits_are_simple() {
        let r = IntMatrix::from_rows(&[vec![4, 0], vec![1, 2]]).unwrap();
        let b =
            DigitSet::from_rows(&[vec![0, 0], vec![0, 3], vec![1, 0], vec![1, 3]]).unwrap();
        assert!(residues_distinct(&r, &b).unwrap());
    }

    #[test]
    fn complete_residues_scale_four() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let reps = complete_residues(&r).unwrap();
        assert_eq!(
            reps,
            vec![int_vec(&[0]), int_vec(&[1]), int_vec(&[2]), int_vec(&[3])]
        );
    }

    #[test]
    fn complete_residues_diag_two() {
        let r = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let reps = complete_residues(&r).unwrap();
        assert_eq!(reps.len(), 4);
        let expected: Vec<IntVec> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|v| int_vec(&v[..]))
            .collect();
        assert_eq!(reps, expected);
    }

    #[test]
    fn complete_residues_are_pairwise_non_congruent() {
        for rows in [
            vec![vec![2, 1], vec![0, 2]],
            vec![vec![4, 0], vec![1, 2]],
            vec![vec![3, 1], vec![1, 3]],
        ] {
            let r = IntMatrix::from_rows(&rows).unwrap();
            let reps = complete_residues(&r).unwrap();
            assert_eq!(BigInt::from(reps.len() as i64), r.det().abs());
            let inv = r.inverse().unwrap();
            for i in 0..reps.len() {
                for j in i + 1..reps.len() {
                    let diff: IntVec =
                        reps[i].iter().zip(&reps[j]).map(|(x, y)| x - y).collect();
                    let sol = inv.mat_int_vec(&diff);
                    assert!(
                        !sol.iter().all(|c| c.is_integer()),
                        "residues {:?} and {:?} congruent",
                        reps[i],
                        reps[j]
                    );
                }
            }
        }
    }
}
