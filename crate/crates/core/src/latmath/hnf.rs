//! Row-style Hermite normal form over the integers.
//!
//! The HNF here is the canonical representative used for lattice equality:
//! row echelon, positive pivots, entries above each pivot reduced into
//! `[0, pivot)`. Zero rows are dropped.

use num::integer::Integer;
use num::traits::{Signed, Zero};

use super::matrix::IntVec;

/// Canonical row HNF of the given generator rows. Returns the nonzero rows.
pub fn row_hnf(mut rows: Vec<IntVec>, cols: usize) -> Vec<IntVec> {
    rows.retain(|r| !r.iter().all(|x| x.is_zero()));
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows.len() {
            break;
        }
        // gcd-reduce all entries in this column at or below pivot_row
        loop {
            let mut nonzero: Vec<usize> = (pivot_row..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                rows.swap(pivot_row, nonzero[0]);
                break;
            }
            // smallest |entry| becomes the divisor
            nonzero.sort_by_key(|&i| rows[i][col].abs());
            let min_i = nonzero[0];
            rows.swap(pivot_row, min_i);
            for &i in &nonzero[1..] {
                let i = if i == pivot_row { min_i } else { i };
                let q = rows[i][col].div_floor(&rows[pivot_row][col]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &rows[pivot_row][j];
                        rows[i][j] -= sub;
                    }
                }
            }
        }
        if rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for x in rows[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        // reduce the entries above the pivot into [0, pivot)
        let pivot = rows[pivot_row][col].clone();
        for i in 0..pivot_row {
            let q = rows[i][col].div_floor(&pivot);
            if !q.is_zero() {
                for j in 0..cols {
                    let sub = &q * &rows[pivot_row][j];
                    rows[i][j] -= sub;
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::matrix::int_vec;

    #[test]
    fn hnf_of_scalar_generators() {
        let rows = vec![int_vec(&[2]), int_vec(&[8])];
        assert_eq!(row_hnf(rows, 1), vec![int_vec(&[2])]);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = row_hnf(vec![int_vec(&[3, 0]), int_vec(&[0, 1]), int_vec(&[1, 2])], 2);
        let b = row_hnf(vec![int_vec(&[1, 2]), int_vec(&[3, 0])], 2);
        // both generate the same lattice: {(1,2),(3,0)} spans index-6 sublattice
        assert_eq!(b, row_hnf(vec![int_vec(&[1, 2]), int_vec(&[0, 6])], 2));
        // adding (0,1) enlarges to Z^2
        assert_eq!(a, vec![int_vec(&[1, 0]), int_vec(&[0, 1])]);
    }

    #[test]
    fn hnf_drops_dependent_rows() {
        let rows = vec![int_vec(&[2, 4]), int_vec(&[1, 2])];
        assert_eq!(row_hnf(rows, 2), vec![int_vec(&[1, 2])]);
    }

    #[test]
    fn hnf_idempotent() {
        let rows = vec![int_vec(&[4, 1]), int_vec(&[0, 3])];
        let h = row_hnf(rows, 2);
        assert_eq!(row_hnf(h.clone(), 2), h);
    }
}
