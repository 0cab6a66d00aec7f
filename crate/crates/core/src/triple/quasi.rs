//! Quasi-product-form witnesses: verification of a supplied witness and a
//! bounded search over unimodular conjugations.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::traits::{Signed, ToPrimitive, Zero};

use super::{exact_int_inverse, HadamardTriple, TripleError};
use crate::latmath::{complete_residues, is_expansive, reduce_mod, row_hnf, IntMatrix, IntVec};

/// Witness data for the quasi-product form of a digit set: a unimodular
/// conjugation `M`, a split dimension, the scaling matrix `Q`, and the
/// decomposition `M B = {(u_i, v_i + Q c_{i,j})}`.
#[derive(Clone, Debug)]
pub struct QuasiProductWitness {
    pub m: IntMatrix,
    /// Split dimension `r`, `1 <= r < d`.
    pub split: usize,
    pub q: IntMatrix,
    /// Leading blocks, one per group (`N1` entries of dimension `r`).
    pub u: Vec<IntVec>,
    /// Trailing offsets, one per group (dimension `d - r`).
    pub v: Vec<IntVec>,
    /// `c[i][j]`: the residue coefficients per group.
    pub c: Vec<Vec<IntVec>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuasiDefect {
    MNotUnimodular,
    SplitOutOfRange,
    /// `M R M^{-1}` has a nonzero entry in the top-right block.
    BlockNotZero { row: usize, col: usize },
    R1NotExpansive,
    R2NotExpansive,
    /// `|det Q| < 2`.
    DetQTooSmall { det: BigInt },
    /// No integer matrix satisfies `R2 Q = Q R2~`.
    QNotCompatible,
    /// `N1 = N / |det R2|` is not an integer or counts disagree.
    CountMismatch { n: usize, det_r2: BigInt },
    /// `M B` does not equal `{(u_i, v_i + Q c_{i,j})}` as a multiset.
    DecompositionMismatch,
    /// `{Q c_{i,j} : j}` misses a residue class mod `R2 Z^{d-r}`.
    ResiduesIncomplete { group: usize },
}

/// Verification outcome, with the derived blocks echoed on success.
#[derive(Clone, Debug)]
pub struct QuasiCheck {
    pub ok: bool,
    pub defects: Vec<QuasiDefect>,
    pub r1: Option<IntMatrix>,
    pub r2: Option<IntMatrix>,
    /// Bottom-left coupling block, rows of length `r`.
    pub c_block: Option<Vec<IntVec>>,
    pub r2_tilde: Option<IntMatrix>,
    pub n1: Option<usize>,
}

fn sub_block(m: &IntMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<IntVec> {
    rows.map(|i| cols.clone().map(|j| m.get(i, j).clone()).collect())
        .collect()
}

fn square_from_rows(rows: Vec<IntVec>) -> Result<IntMatrix, TripleError> {
    Ok(IntMatrix::from_bigint_rows(rows)?)
}

/// Checks a supplied quasi-product witness against the triple.
pub fn verify_quasi_product(
    t: &HadamardTriple,
    w: &QuasiProductWitness,
) -> Result<QuasiCheck, TripleError> {
    let d = t.dim();
    if d < 2 {
        return Err(TripleError::DimensionTooSmall(d));
    }
    let mut defects = Vec::new();
    let mut check = QuasiCheck {
        ok: false,
        defects: Vec::new(),
        r1: None,
        r2: None,
        c_block: None,
        r2_tilde: None,
        n1: None,
    };
    if w.split == 0 || w.split >= d {
        defects.push(QuasiDefect::SplitOutOfRange);
    }
    if !w.m.is_unimodular() {
        defects.push(QuasiDefect::MNotUnimodular);
    }
    if !defects.is_empty() {
        check.defects = defects;
        return Ok(check);
    }
    let r = w.split;
    let m_inv = exact_int_inverse(&w.m)?;
    let conj = w.m.mul(t.r()).mul(&m_inv);
    for i in 0..r {
        for j in r..d {
            if !conj.get(i, j).is_zero() {
                defects.push(QuasiDefect::BlockNotZero { row: i, col: j });
            }
        }
    }
    let r1 = square_from_rows(sub_block(&conj, 0..r, 0..r))?;
    let r2 = square_from_rows(sub_block(&conj, r..d, r..d))?;
    if !is_expansive(&r1).is_expansive() {
        defects.push(QuasiDefect::R1NotExpansive);
    }
    if !is_expansive(&r2).is_expansive() {
        defects.push(QuasiDefect::R2NotExpansive);
    }
    let det_q = w.q.det();
    if det_q.abs() < BigInt::from(2) {
        defects.push(QuasiDefect::DetQTooSmall { det: det_q.clone() });
    }
    // R2 Q = Q R2~ for an integer R2~
    let r2_tilde = {
        let prod = r2.mul(&w.q).to_rat();
        let solved = w.q.inverse().and_then(|qi| Ok(qi.mul(&prod)));
        match solved {
            Ok(sol) => {
                let dim = d - r;
                let mut rows = Vec::with_capacity(dim);
                let mut integral = true;
                for i in 0..dim {
                    let mut row = Vec::with_capacity(dim);
                    for j in 0..dim {
                        let e = sol.get(i, j);
                        if e.is_integer() {
                            row.push(e.to_integer());
                        } else {
                            integral = false;
                        }
                    }
                    rows.push(row);
                }
                if integral {
                    Some(IntMatrix::from_bigint_rows(rows)?)
                } else {
                    None
                }
            }
            Err(_) => None,
        }
    };
    if r2_tilde.is_none() {
        defects.push(QuasiDefect::QNotCompatible);
    }
    let n = t.n_digits();
    let det_r2 = r2.det().abs();
    let n2 = det_r2.to_usize().unwrap_or(0);
    if n2 == 0 || n % n2 != 0 {
        defects.push(QuasiDefect::CountMismatch {
            n,
            det_r2: det_r2.clone(),
        });
        check.defects = defects;
        return Ok(check);
    }
    let n1 = n / n2;
    if w.u.len() != n1 || w.v.len() != n1 || w.c.len() != n1 || w.c.iter().any(|g| g.len() != n2)
    {
        defects.push(QuasiDefect::CountMismatch {
            n,
            det_r2: det_r2.clone(),
        });
    } else {
        // multiset equality: M B == {(u_i, v_i + Q c_{i,j})}
        let mut expected: HashMap<IntVec, usize> = HashMap::new();
        for b in t.b().iter() {
            *expected.entry(w.m.mat_vec(b)).or_insert(0) += 1;
        }
        let mut matched = true;
        for i in 0..n1 {
            for j in 0..n2 {
                let qc = w.q.mat_vec(&w.c[i][j]);
                let mut vec: IntVec = w.u[i].clone();
                vec.extend(
                    w.v[i]
                        .iter()
                        .zip(&qc)
                        .map(|(vi, qi)| vi + qi),
                );
                match expected.get_mut(&vec) {
                    Some(count) if *count > 0 => *count -= 1,
                    _ => {
                        matched = false;
                    }
                }
            }
        }
        if !matched || expected.values().any(|&c| c > 0) {
            defects.push(QuasiDefect::DecompositionMismatch);
        }
        // {Q c_{i,j} : j} is a complete residue system mod R2 Z^{d-r}
        let r2_inv = r2.inverse()?;
        for i in 0..n1 {
            let mut seen: Vec<IntVec> = Vec::with_capacity(n2);
            for j in 0..n2 {
                let qc = w.q.mat_vec(&w.c[i][j]);
                seen.push(reduce_mod(&r2, &r2_inv, &qc));
            }
            seen.sort();
            seen.dedup();
            if seen.len() != n2 {
                defects.push(QuasiDefect::ResiduesIncomplete { group: i });
            }
        }
    }
    check.ok = defects.is_empty();
    check.defects = defects;
    check.r1 = Some(r1);
    check.r2 = Some(r2);
    check.c_block = Some(sub_block(&conj, r..d, 0..r));
    check.r2_tilde = r2_tilde;
    check.n1 = Some(n1);
    Ok(check)
}

/// Candidate count cap for the unimodular scan.
pub const SEARCH_CAP: usize = 1_000_000;

/// Enumerates integer matrices with entries in `[-bound, bound]`, ordered
/// by shells of max-|entry| and, within a shell, by an odometer whose
/// per-entry value order is `0, 1, -1, 2, -2, ...` (identity-like
/// candidates come first).
struct UnimodularScan {
    dim: usize,
    bound: i64,
    shell: i64,
    word: Vec<usize>,
    done_shell: bool,
}

impl UnimodularScan {
    fn new(dim: usize, bound: i64) -> Self {
        Self {
            dim,
            bound,
            shell: 0,
            word: vec![0; dim * dim],
            done_shell: false,
        }
    }

    fn values(shell: i64) -> Vec<i64> {
        let mut v = vec![0i64];
        for a in 1..=shell {
            v.push(a);
            v.push(-a);
        }
        v
    }
}

impl Iterator for UnimodularScan {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            if self.shell > self.bound {
                return None;
            }
            let values = Self::values(self.shell);
            if self.done_shell {
                self.shell += 1;
                self.word = vec![0; self.dim * self.dim];
                self.done_shell = false;
                continue;
            }
            let entries: Vec<i64> = self.word.iter().map(|&i| values[i]).collect();
            // advance odometer (last entry fastest)
            let mut pos = self.word.len();
            loop {
                if pos == 0 {
                    self.done_shell = true;
                    break;
                }
                pos -= 1;
                self.word[pos] += 1;
                if self.word[pos] < values.len() {
                    break;
                }
                self.word[pos] = 0;
            }
            // skip entries already produced in a smaller shell
            if self.shell > 0 && entries.iter().all(|e| e.abs() < self.shell) {
                continue;
            }
            return Some(entries);
        }
    }
}

/// Bounded scan for a quasi-product witness: unimodular `M` with entries in
/// `[-entry_bound, entry_bound]`, all splits `r`, with `Q`, `v_i`, `c_{i,j}`
/// derived from the group structure of `M B`. Returns the first witness
/// that passes full verification; absence within the bound is not a
/// disproof.
pub fn search_quasi_product(
    t: &HadamardTriple,
    entry_bound: i64,
    cap: usize,
) -> Result<Option<(QuasiProductWitness, QuasiCheck)>, TripleError> {
    let d = t.dim();
    if d < 2 {
        return Err(TripleError::DimensionTooSmall(d));
    }
    let mut candidates = 0usize;
    for entries in UnimodularScan::new(d, entry_bound) {
        candidates += 1;
        if candidates > cap {
            break;
        }
        let rows: Vec<Vec<i64>> = entries.chunks(d).map(|c| c.to_vec()).collect();
        let m = IntMatrix::from_rows(&rows)?;
        if !m.is_unimodular() {
            continue;
        }
        for split in 1..d {
            if let Some(w) = derive_witness(t, &m, split)? {
                let check = verify_quasi_product(t, &w)?;
                if check.ok {
                    return Ok(Some((w, check)));
                }
            }
        }
    }
    Ok(None)
}

/// Attempts to derive witness data for a fixed `(M, r)`: groups `M B` by
/// leading coordinates, takes `v_i` as the lex-least member of each group,
/// and `Q` as the HNF basis of the lattice spanned by in-group differences.
fn derive_witness(
    t: &HadamardTriple,
    m: &IntMatrix,
    split: usize,
) -> Result<Option<QuasiProductWitness>, TripleError> {
    let d = t.dim();
    let r = split;
    let m_inv = exact_int_inverse(m)?;
    let conj = m.mul(t.r()).mul(&m_inv);
    for i in 0..r {
        for j in r..d {
            if !conj.get(i, j).is_zero() {
                return Ok(None);
            }
        }
    }
    let r2 = square_from_rows(sub_block(&conj, r..d, r..d))?;
    let det_r2 = r2.det().abs().to_usize().unwrap_or(0);
    if det_r2 < 2 || t.n_digits() % det_r2 != 0 {
        return Ok(None);
    }
    // group M B by the leading r coordinates
    let mut groups: HashMap<IntVec, Vec<IntVec>> = HashMap::new();
    for b in t.b().iter() {
        let mb = m.mat_vec(b);
        groups
            .entry(mb[..r].to_vec())
            .or_default()
            .push(mb[r..].to_vec());
    }
    let n1 = t.n_digits() / det_r2;
    if groups.len() != n1 || groups.values().any(|g| g.len() != det_r2) {
        return Ok(None);
    }
    // Q = HNF basis (as columns) of the lattice of in-group differences
    let mut diffs: Vec<IntVec> = Vec::new();
    let mut u: Vec<IntVec> = groups.keys().cloned().collect();
    u.sort();
    let mut v = Vec::with_capacity(n1);
    let mut tails: Vec<Vec<IntVec>> = Vec::with_capacity(n1);
    for key in &u {
        let mut tail = groups[key].clone();
        tail.sort();
        let base = tail[0].clone();
        for w in &tail {
            let diff: IntVec = w.iter().zip(&base).map(|(x, y)| x - y).collect();
            if diff.iter().any(|x| !x.is_zero()) {
                diffs.push(diff);
            }
        }
        v.push(base);
        tails.push(tail);
    }
    let hnf = row_hnf(diffs, d - r);
    if hnf.len() != d - r {
        return Ok(None);
    }
    // columns of Q are the basis vectors
    let q_rows: Vec<IntVec> = (0..d - r)
        .map(|i| (0..d - r).map(|j| hnf[j][i].clone()).collect())
        .collect();
    let q = IntMatrix::from_bigint_rows(q_rows)?;
    let q_inv = q.inverse()?;
    let mut c: Vec<Vec<IntVec>> = Vec::with_capacity(n1);
    for (gi, tail) in tails.iter().enumerate() {
        let mut group_c = Vec::with_capacity(det_r2);
        for w in tail {
            let diff: IntVec = w.iter().zip(&v[gi]).map(|(x, y)| x - y).collect();
            let coeff = q_inv.mat_int_vec(&diff);
            if coeff.iter().any(|x| !x.is_integer()) {
                return Ok(None);
            }
            group_c.push(coeff.into_iter().map(|x| x.to_integer()).collect());
        }
        c.push(group_c);
    }
    Ok(Some(QuasiProductWitness {
        m: m.clone(),
        split,
        q,
        u,
        v,
        c,
    }))
}

/// Result check used by examples: the residues in one factor must form a
/// complete system modulo `R2`.
pub fn residues_complete_mod(r2: &IntMatrix, values: &[IntVec]) -> Result<bool, TripleError> {
    let expected = complete_residues(r2)?;
    let inv = r2.inverse()?;
    let mut reduced: Vec<IntVec> = values.iter().map(|v| reduce_mod(r2, &inv, v)).collect();
    reduced.sort();
    Ok(reduced == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::{int_vec, DigitSet};
    use crate::triple::fixtures::*;
    use crate::triple::UNITARITY_TOL;

    fn example53_witness() -> QuasiProductWitness {
        QuasiProductWitness {
            m: IntMatrix::identity(2),
            split: 1,
            q: IntMatrix::from_rows(&[vec![3]]).unwrap(),
            u: vec![int_vec(&[0]), int_vec(&[1])],
            v: vec![int_vec(&[0]), int_vec(&[0])],
            c: vec![
                vec![int_vec(&[0]), int_vec(&[1])],
                vec![int_vec(&[0]), int_vec(&[1])],
            ],
        }
    }

    #[test]
    fn example53_witness_verifies() {
        let t = planar_z();
        let check = verify_quasi_product(&t, &example53_witness()).unwrap();
        assert!(check.ok, "{:?}", check.defects);
        assert_eq!(check.n1, Some(2));
        assert_eq!(
            check.r2_tilde.as_ref().map(|m| m.det()),
            Some(BigInt::from(2))
        );
        // {0, 3} is a complete residue system mod 2
        assert!(residues_complete_mod(
            check.r2.as_ref().unwrap(),
            &[int_vec(&[0]), int_vec(&[3])]
        )
        .unwrap());
    }

    #[test]
    fn det_q_one_is_rejected() {
        let t = planar_z();
        let mut w = example53_witness();
        w.q = IntMatrix::from_rows(&[vec![1]]).unwrap();
        // c must be rescaled to keep the decomposition consistent
        w.c = vec![
            vec![int_vec(&[0]), int_vec(&[3])],
            vec![int_vec(&[0]), int_vec(&[3])],
        ];
        let check = verify_quasi_product(&t, &w).unwrap();
        assert!(!check.ok);
        assert!(check
            .defects
            .iter()
            .any(|d| matches!(d, QuasiDefect::DetQTooSmall { .. })));
    }

    #[test]
    fn one_dimensional_input_is_an_error() {
        let t = jp();
        assert!(matches!(
            verify_quasi_product(&t, &example53_witness()),
            Err(TripleError::DimensionTooSmall(1))
        ));
        assert!(matches!(
            search_quasi_product(&t, 1, SEARCH_CAP),
            Err(TripleError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn search_finds_example53_witness_with_identity() {
        let t = planar_z();
        let found = search_quasi_product(&t, 1, SEARCH_CAP).unwrap();
        let (w, check) = found.expect("witness expected");
        assert!(check.ok);
        assert_eq!(w.m, IntMatrix::identity(2));
        assert_eq!(w.q.det().abs(), BigInt::from(3));
    }

    #[test]
    fn complete_residue_digits_have_no_witness() {
        // R = diag(2,2), B = {0,1}^2: every derived Q has |det Q| = 1
        let r = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        let b =
            DigitSet::from_rows(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let l = b.clone();
        let (t, _) = HadamardTriple::new(r, b, l, UNITARITY_TOL).unwrap();
        let found = search_quasi_product(&t, 1, SEARCH_CAP).unwrap();
        assert!(found.is_none());
    }
}
