//! Lattices with canonical (HNF) bases, invariant lattices, and duals.

use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Zero};

use super::hnf::row_hnf;
use super::matrix::{DigitSet, IntMatrix, IntVec, RatMatrix, RatVec};
use super::LatticeError;

/// A lattice in `Q^d`, stored as `(1/den) * rowspan_Z(basis_rows)` with the
/// integer rows in canonical Hermite normal form and `gcd(den, entries) = 1`.
/// Two lattices are equal iff their stored forms are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    den: BigInt,
    basis_rows: Vec<IntVec>,
}

impl Lattice {
    /// Lattice generated over `Z` by integer row vectors.
    pub fn from_int_generators(dim: usize, rows: Vec<IntVec>) -> Self {
        Self {
            dim,
            den: BigInt::one(),
            basis_rows: row_hnf(rows, dim),
        }
        .normalized()
    }

    /// Lattice generated over `Z` by rational row vectors.
    pub fn from_rat_generators(dim: usize, rows: Vec<RatVec>) -> Self {
        let mut den = BigInt::one();
        for r in &rows {
            for x in r {
                den = den.lcm(x.denom());
            }
        }
        let scaled: Vec<IntVec> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.numer() * (&den / x.denom()))
                    .collect()
            })
            .collect();
        Self {
            dim,
            den,
            basis_rows: row_hnf(scaled, dim),
        }
        .normalized()
    }

    pub fn standard(dim: usize) -> Self {
        Self::from_int_generators(dim, IntMatrix::identity(dim).rows())
    }

    fn normalized(mut self) -> Self {
        let mut g = self.den.clone();
        for r in &self.basis_rows {
            for x in r {
                g = g.gcd(x);
            }
        }
        if g > BigInt::one() {
            self.den /= &g;
            for r in self.basis_rows.iter_mut() {
                for x in r.iter_mut() {
                    *x /= &g;
                }
            }
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis_rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Denominator of the stored scaled basis.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// Integer HNF rows of `den * lattice`.
    pub fn scaled_basis_rows(&self) -> &[IntVec] {
        &self.basis_rows
    }

    /// Basis vectors as rational rows.
    pub fn basis(&self) -> Vec<RatVec> {
        self.basis_rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::new(x.clone(), self.den.clone()))
                    .collect()
            })
            .collect()
    }

    pub fn basis_matrix(&self) -> Result<RatMatrix, LatticeError> {
        if !self.is_full_rank() {
            return Err(LatticeError::NotFullRank {
                rank: self.rank(),
                dim: self.dim,
            });
        }
        let rows = self.basis();
        Ok(RatMatrix::from_entries(
            self.dim,
            self.dim,
            rows.into_iter().flatten().collect(),
        ))
    }

    /// Exact membership test.
    pub fn contains(&self, v: &RatVec) -> bool {
        assert_eq!(v.len(), self.dim);
        // w = den * v must be integral, then reduce against the HNF rows
        let mut w: Vec<BigRational> = v
            .iter()
            .map(|x| x * BigRational::from_integer(self.den.clone()))
            .collect();
        if w.iter().any(|x| !x.is_integer()) {
            return false;
        }
        let mut w: IntVec = w.drain(..).map(|x| x.to_integer()).collect();
        for row in &self.basis_rows {
            let pivot_col = row.iter().position(|x| !x.is_zero()).unwrap();
            if w[pivot_col].is_zero() {
                continue;
            }
            let (q, r) = w[pivot_col].div_rem(&row[pivot_col]);
            if !r.is_zero() {
                return false;
            }
            for j in 0..self.dim {
                let sub = &q * &row[j];
                w[j] -= sub;
            }
        }
        w.iter().all(|x| x.is_zero())
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(1/{} * {:?})", self.den, self.basis_rows)
    }
}

/// Smallest lattice containing `B` and invariant under `R`: the `Z`-span of
/// `R^k b` for `b` in `B` and `0 <= k < d` (Cayley–Hamilton closes the span).
/// Invariance `R * L ⊆ L` is re-verified exactly before returning.
pub fn smallest_invariant_lattice(r: &IntMatrix, b: &DigitSet) -> Result<Lattice, LatticeError> {
    let d = r.dim();
    if b.dim() != d {
        return Err(LatticeError::DimensionMismatch {
            expected: d,
            got: b.dim(),
        });
    }
    let mut generators: Vec<IntVec> = Vec::new();
    for digit in b.iter() {
        let mut v = digit.clone();
        for _ in 0..d {
            generators.push(v.clone());
            v = r.mat_vec(&v);
        }
    }
    let lattice = Lattice::from_int_generators(d, generators);
    for row in lattice.basis() {
        let image: RatVec = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| BigRational::from_integer(r.get(i, j).clone()) * &row[j])
                    .sum()
            })
            .collect();
        if !lattice.contains(&image) {
            return Err(LatticeError::BadDigitSet(
                "invariant lattice verification failed".into(),
            ));
        }
    }
    Ok(lattice)
}

/// Dual lattice `{x : <x, v> in Z for all v in L}` of a full-rank lattice.
pub fn dual_lattice(l: &Lattice) -> Result<Lattice, LatticeError> {
    let bm = l.basis_matrix()?;
    let inv_t = bm.transpose().inverse()?;
    let rows: Vec<RatVec> = (0..l.dim())
        .map(|i| (0..l.dim()).map(|j| inv_t.get(i, j).clone()).collect())
        .collect();
    Ok(Lattice::from_rat_generators(l.dim(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::matrix::int_vec;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn jp_invariant_lattice_is_two_z() {
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let l = smallest_invariant_lattice(&r, &b).unwrap();
        assert_eq!(l, Lattice::from_int_generators(1, vec![int_vec(&[2])]));
        assert!(l.is_full_rank());
    }

    #[test]
    fn lebesgue_invariant_lattice_is_z() {
        let r = IntMatrix::from_rows(&[vec![2]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 1]).unwrap();
        let l = smallest_invariant_lattice(&r, &b).unwrap();
        assert_eq!(l, Lattice::standard(1));
    }

    #[test]
    fn final_example_lattice_is_z2() {
        let r = IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        let b =
            DigitSet::from_rows(&[vec![0, 0], vec![3, 0], vec![0, 1], vec![3, 1]]).unwrap();
        let l = smallest_invariant_lattice(&r, &b).unwrap();
        assert_eq!(l, Lattice::standard(2));
    }

    #[test]
    fn idempotent_under_enlargement() {
        let r = IntMatrix::from_rows(&[vec![4, 0], vec![1, 2]]).unwrap();
        let b =
            DigitSet::from_rows(&[vec![0, 0], vec![0, 3], vec![1, 0], vec![1, 3]]).unwrap();
        let l = smallest_invariant_lattice(&r, &b).unwrap();
        // feed the basis back in as digits (it contains 0? no -- use new set with 0)
        let mut rows: Vec<IntVec> = l.scaled_basis_rows().to_vec();
        rows.push(int_vec(&[0, 0]));
        let b2 = DigitSet::new(2, rows).unwrap();
        let l2 = smallest_invariant_lattice(&r, &b2).unwrap();
        assert_eq!(l, l2);
    }

    #[test]
    fn dual_examples() {
        // Z^d self-dual
        let z2 = Lattice::standard(2);
        assert_eq!(dual_lattice(&z2).unwrap(), z2);
        // 2Z -> (1/2)Z
        let two_z = Lattice::from_int_generators(1, vec![int_vec(&[2])]);
        let half_z = dual_lattice(&two_z).unwrap();
        assert!(half_z.contains(&vec![rat(1, 2)]));
        assert!(half_z.contains(&vec![rat(3, 2)]));
        assert!(!half_z.contains(&vec![rat(1, 4)]));
        // 3Z x Z -> (1/3)Z x Z
        let l = Lattice::from_int_generators(2, vec![int_vec(&[3, 0]), int_vec(&[0, 1])]);
        let dual = dual_lattice(&l).unwrap();
        assert!(dual.contains(&vec![rat(1, 3), rat(0, 1)]));
        assert!(!dual.contains(&vec![rat(1, 3), rat(1, 2)]));
    }

    #[test]
    fn dual_is_an_involution() {
        for rows in [
            vec![int_vec(&[2, 1]), int_vec(&[0, 3])],
            vec![int_vec(&[1, 0]), int_vec(&[0, 1])],
            vec![int_vec(&[5, 2]), int_vec(&[1, 4])],
        ] {
            let l = Lattice::from_int_generators(2, rows);
            let dd = dual_lattice(&dual_lattice(&l).unwrap()).unwrap();
            assert_eq!(dd, l);
        }
    }

    #[test]
    fn proper_subspace_flagged() {
        let r = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let b = DigitSet::from_rows(&[vec![0, 0], vec![1, 0]]).unwrap();
        let l = smallest_invariant_lattice(&r, &b).unwrap();
        assert!(!l.is_full_rank());
        assert!(dual_lattice(&l).is_err());
    }
}
