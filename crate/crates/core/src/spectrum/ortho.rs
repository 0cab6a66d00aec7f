//! Pairwise orthogonality checks and the search for large mutually
//! orthogonal frequency sets.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::Zero;

use super::SpectrumError;
use crate::fourier::{MuHatEvaluator, RationalMuHat, ZeroScanOutcome};
use crate::latmath::{IntVec, RatVec};

/// Maximum certified magnitude of the transform over distinct frequency
/// pairs, with exact zeros counted separately.
#[derive(Clone, Debug)]
pub struct OrthoReport {
    pub max_magnitude: f64,
    pub pairs: usize,
    pub exact_zero_pairs: usize,
    pub worst_pair: Option<(IntVec, IntVec)>,
}

/// Checks `|muhat(lambda - lambda')|` over all distinct pairs.
pub fn orthogonality_check(
    ev: &MuHatEvaluator,
    freqs: &[IntVec],
    tol: f64,
    pair_cap: usize,
) -> Result<OrthoReport, SpectrumError> {
    let n = freqs.len();
    let pairs = n.saturating_mul(n.saturating_sub(1)) / 2;
    if pairs > pair_cap {
        return Err(SpectrumError::PairCap {
            pairs,
            cap: pair_cap,
        });
    }
    let mut max_magnitude: f64 = 0.0;
    let mut exact_zero_pairs = 0;
    let mut worst_pair = None;
    for i in 0..n {
        for j in i + 1..n {
            let diff: RatVec = freqs[i]
                .iter()
                .zip(&freqs[j])
                .map(|(a, b)| BigRational::from_integer(a - b))
                .collect();
            let value = ev.eval_rational(&diff, tol)?;
            match value {
                RationalMuHat::ExactZero { .. } => exact_zero_pairs += 1,
                RationalMuHat::Numeric { .. } => {
                    let mag = value.magnitude_upper();
                    if mag > max_magnitude {
                        max_magnitude = mag;
                        worst_pair = Some((freqs[i].clone(), freqs[j].clone()));
                    }
                }
            }
        }
    }
    Ok(OrthoReport {
        max_magnitude,
        pairs,
        exact_zero_pairs,
        worst_pair,
    })
}

/// Result of the orthogonal-set clique search.
#[derive(Clone, Debug)]
pub struct OrthoSearchResult {
    pub set: Vec<RatVec>,
    pub grid_size: usize,
    pub edges: usize,
    /// Stopped early because a set of the requested size was found.
    pub reached_max: bool,
    /// The clique search ran to completion within its node budget, so the
    /// returned set is a maximum clique over the grid.
    pub exhaustive: bool,
}

/// All reduced rationals `p/q` with `1 <= q <= den_bound` inside `[lo, hi]`.
fn farey_points(lo: &BigRational, hi: &BigRational, den_bound: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    for q in 1..=den_bound {
        let qb = BigInt::from(q);
        let p_lo = (lo * BigRational::from_integer(qb.clone())).ceil().to_integer();
        let p_hi = (hi * BigRational::from_integer(qb.clone())).floor().to_integer();
        let mut p = p_lo;
        while p <= p_hi {
            let r = BigRational::new(p.clone(), qb.clone());
            out.push(r);
            p += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Greedy-plus-exhaustive search for the largest set of frequencies in a
/// rational grid whose pairwise differences are certified zeros of the
/// transform. Orthogonality is decided by exact certificates only, so the
/// returned set is genuinely mutually orthogonal; absence of a larger set
/// is conclusive only over the searched grid (`exhaustive = true`).
pub fn orthogonal_set_search(
    ev: &MuHatEvaluator,
    boxes: &[(BigRational, BigRational)],
    den_bound: i64,
    max_size: usize,
    node_budget: usize,
    grid_cap: usize,
) -> Result<OrthoSearchResult, SpectrumError> {
    let per_axis: Vec<Vec<BigRational>> = boxes
        .iter()
        .map(|(lo, hi)| farey_points(lo, hi, den_bound))
        .collect();
    let mut grid_size: usize = 1;
    for axis in &per_axis {
        grid_size = grid_size.saturating_mul(axis.len());
        if grid_size > grid_cap {
            return Err(SpectrumError::GridCap { cap: grid_cap });
        }
    }
    // cartesian product
    let dim = per_axis.len();
    let mut grid: Vec<RatVec> = Vec::with_capacity(grid_size);
    let mut idx = vec![0usize; dim];
    if per_axis.iter().all(|a| !a.is_empty()) {
        loop {
            grid.push(idx.iter().zip(&per_axis).map(|(&i, a)| a[i].clone()).collect());
            let mut pos = dim;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < per_axis[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    let n = grid.len();
    if n == 0 {
        return Ok(OrthoSearchResult {
            set: Vec::new(),
            grid_size: 0,
            edges: 0,
            reached_max: false,
            exhaustive: true,
        });
    }
    // adjacency via exact certificates
    let words = n.div_ceil(64);
    let mut adj = vec![0u64; n * words];
    let mut edges = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let diff: RatVec = grid[i]
                .iter()
                .zip(&grid[j])
                .map(|(a, b)| a - b)
                .collect();
            if matches!(ev.zero_certificate(&diff), ZeroScanOutcome::ZeroAt { .. }) {
                adj[i * words + j / 64] |= 1 << (j % 64);
                adj[j * words + i / 64] |= 1 << (i % 64);
                edges += 1;
            }
        }
    }
    // greedy seed, then exact branch-and-bound with a node budget
    let mut best: Vec<usize> = greedy_clique(&adj, words, n);
    let mut nodes = 0usize;
    let mut exhausted = true;
    let mut reached = best.len() >= max_size;
    if !reached {
        let all: Vec<usize> = (0..n).collect();
        let mut current = Vec::new();
        expand(
            &adj,
            words,
            &all,
            &mut current,
            &mut best,
            max_size,
            node_budget,
            &mut nodes,
            &mut exhausted,
        );
        reached = best.len() >= max_size;
    }
    best.sort();
    Ok(OrthoSearchResult {
        set: best.into_iter().map(|i| grid[i].clone()).collect(),
        grid_size: n,
        edges,
        reached_max: reached,
        exhaustive: exhausted && !reached,
    })
}

fn neighbors(adj: &[u64], words: usize, v: usize) -> &[u64] {
    &adj[v * words..(v + 1) * words]
}

fn is_edge(adj: &[u64], words: usize, a: usize, b: usize) -> bool {
    adj[a * words + b / 64] >> (b % 64) & 1 == 1
}

fn greedy_clique(adj: &[u64], words: usize, n: usize) -> Vec<usize> {
    // order by degree, extend greedily from each of the top vertices
    let degree: Vec<usize> = (0..n)
        .map(|v| neighbors(adj, words, v).iter().map(|w| w.count_ones() as usize).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(degree[v]));
    let mut best = Vec::new();
    for &start in order.iter().take(32.min(n)) {
        let mut clique = vec![start];
        for &v in &order {
            if v != start && clique.iter().all(|&c| is_edge(adj, words, c, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn expand(
    adj: &[u64],
    words: usize,
    candidates: &[usize],
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
    max_size: usize,
    budget: usize,
    nodes: &mut usize,
    exhausted: &mut bool,
) {
    if best.len() >= max_size {
        return;
    }
    *nodes += 1;
    if *nodes > budget {
        *exhausted = false;
        return;
    }
    if current.len() > best.len() {
        *best = current.clone();
    }
    if current.len() + candidates.len() <= best.len() {
        return; // bound
    }
    for (pos, &v) in candidates.iter().enumerate() {
        if current.len() + (candidates.len() - pos) <= best.len() {
            return;
        }
        let rest: Vec<usize> = candidates[pos + 1..]
            .iter()
            .copied()
            .filter(|&u| is_edge(adj, words, v, u))
            .collect();
        current.push(v);
        expand(adj, words, &rest, current, best, max_size, budget, nodes, exhausted);
        current.pop();
        if best.len() >= max_size || !*exhausted {
            return;
        }
    }
}

pub(crate) fn zero_rat(dim: usize) -> RatVec {
    vec![BigRational::zero(); dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::{int_vec, DigitSet, IntMatrix};
    use crate::triple::fixtures::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn evaluator(t: &crate::triple::HadamardTriple) -> MuHatEvaluator {
        MuHatEvaluator::new(t.r(), t.b()).unwrap()
    }

    #[test]
    fn jp_level_three_orthogonal() {
        let t = jp();
        let cand = crate::spectrum::canonical_levels(&t, 3, 1 << 20).unwrap();
        let ev = evaluator(&t);
        let report =
            orthogonality_check(&ev, cand.level(2).unwrap(), 1e-10, 1 << 20).unwrap();
        assert!(report.max_magnitude < 1e-8, "{report:?}");
        // every JP difference carries an exact certificate
        assert_eq!(report.exact_zero_pairs, report.pairs);
    }

    #[test]
    fn lebesgue_canonical_is_orthonormal_but_incomplete() {
        let t = lebesgue();
        let freqs: Vec<IntVec> = (0..8).map(|k| int_vec(&[k])).collect();
        let ev = evaluator(&t);
        let report = orthogonality_check(&ev, &freqs, 1e-12, 1 << 20).unwrap();
        assert!(report.max_magnitude < 1e-10);
    }

    #[test]
    fn singleton_is_vacuous() {
        let t = jp();
        let ev = evaluator(&t);
        let report = orthogonality_check(&ev, &[int_vec(&[0])], 1e-10, 10).unwrap();
        assert_eq!(report.pairs, 0);
        assert_eq!(report.max_magnitude, 0.0);
    }

    #[test]
    fn middle_third_has_no_three_element_set() {
        // small box keeps this unit test quick; the acceptance suite runs
        // the full [-10,10] x denominators <= 12 search
        let r = IntMatrix::from_rows(&[vec![3]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let ev = MuHatEvaluator::new(&r, &b).unwrap();
        let result = orthogonal_set_search(
            &ev,
            &[(rat(-4, 1), rat(4, 1))],
            6,
            3,
            1 << 22,
            1 << 20,
        )
        .unwrap();
        assert!(result.set.len() <= 2, "{:?}", result.set);
        assert!(result.exhaustive);
    }

    #[test]
    fn jp_finds_a_four_element_set_quickly() {
        let t = jp();
        let ev = evaluator(&t);
        let result = orthogonal_set_search(
            &ev,
            &[(rat(-10, 1), rat(10, 1))],
            4,
            4,
            1 << 22,
            1 << 20,
        )
        .unwrap();
        assert!(result.set.len() >= 4, "{:?}", result.set);
        assert!(result.reached_max);
    }

    #[test]
    fn empty_box_gives_empty_set() {
        let t = jp();
        let ev = evaluator(&t);
        let result = orthogonal_set_search(
            &ev,
            &[(rat(1, 1), rat(0, 1))],
            4,
            3,
            1 << 16,
            1 << 20,
        )
        .unwrap();
        assert!(result.set.is_empty());
    }
}
