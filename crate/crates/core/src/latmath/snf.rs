//! Smith normal form over the integers, with unimodular transforms tracked.

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{Signed, Zero};

use super::matrix::IntMatrix;
use super::LatticeError;

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal with
/// nonnegative entries in a divisibility chain.
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `S`.
    pub diag: Vec<BigInt>,
}

/// Computes the Smith normal form of a square integer matrix.
pub fn smith_normal_form(a: &IntMatrix) -> Result<SmithDecomposition, LatticeError> {
    let d = a.dim();
    let mut s: Vec<Vec<BigInt>> = a.rows();
    let mut u: Vec<Vec<BigInt>> = IntMatrix::identity(d).rows();
    let mut v: Vec<Vec<BigInt>> = IntMatrix::identity(d).rows();

    let row_sub = |s: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, i: usize, k: usize, q: &BigInt| {
        for j in 0..d {
            let sub = q * &s[k][j];
            s[i][j] -= sub;
            let sub = q * &u[k][j];
            u[i][j] -= sub;
        }
    };
    let col_sub = |s: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, j: usize, k: usize, q: &BigInt| {
        for i in 0..d {
            let sub = q * &s[i][k];
            s[i][j] -= sub;
            let sub = q * &v[i][k];
            v[i][j] -= sub;
        }
    };

    for t in 0..d {
        'pivot: loop {
            // locate a minimal-|entry| nonzero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..d {
                for j in t..d {
                    if !s[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot; // trailing block is zero
            };
            if pi != t {
                s.swap(t, pi);
                u.swap(t, pi);
            }
            if pj != t {
                for row in s.iter_mut() {
                    row.swap(t, pj);
                }
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
            }
            // clear the pivot row and column
            let mut dirty = false;
            for i in t + 1..d {
                if !s[i][t].is_zero() {
                    let q = s[i][t].div_floor(&s[t][t]);
                    row_sub(&mut s, &mut u, i, t, &q);
                    if !s[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..d {
                if !s[t][j].is_zero() {
                    let q = s[t][j].div_floor(&s[t][t]);
                    col_sub(&mut s, &mut v, j, t, &q);
                    if !s[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // divisibility fix: pivot must divide the rest of the block
            let mut fixed = true;
            'scan: for i in t + 1..d {
                for j in t + 1..d {
                    if !(&s[i][j] % &s[t][t]).is_zero() {
                        // fold the offending row into the pivot row
                        for col in 0..d {
                            let add = s[i][col].clone();
                            s[t][col] += add;
                            let add = u[i][col].clone();
                            u[t][col] += add;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break 'pivot;
            }
        }
    }
    let mut diag = Vec::with_capacity(d);
    for t in 0..d {
        if s[t][t].is_negative() {
            for j in 0..d {
                s[t][j] = -s[t][j].clone();
                u[t][j] = -u[t][j].clone();
            }
        }
        diag.push(s[t][t].clone());
    }
    let u = IntMatrix::from_bigint_rows(u)?;
    let v = IntMatrix::from_bigint_rows(v)?;
    debug_assert!(u.is_unimodular() && v.is_unimodular());
    Ok(SmithDecomposition { u, v, diag })
}
