//! Frame-bounded subset selection: extract `N^n` frequencies from a
//! complete residue system so the selected rows keep the lower frame
//! bound as large as possible.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::traits::ToPrimitive;

use super::TowerError;
use crate::fourier::{build_fourier_matrix, FourierMatrix, FrameBounds};
use crate::latmath::{complete_residues, IntVec, RatMatrix};
use crate::rng::Lcg;
use crate::triple::AffinePair;

/// Selection instance: all residues mod `(R^T)^n` as the frequency
/// universe, level-n digit words as columns, `N^n` rows to choose.
pub struct SelectionProblem {
    pub n: usize,
    universe: Vec<IntVec>,
    digits: Vec<IntVec>,
    scale: RatMatrix,
    target: usize,
    /// Full universe matrix, rows in universe order.
    full: FourierMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectionMethod {
    Exhaustive,
    Greedy,
    RandomSwap { seed: u64, iterations: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeuristicMethod {
    Greedy,
    RandomSwap,
}

#[derive(Clone, Debug)]
pub struct SelectionResult {
    /// Indices into the universe, ascending.
    pub indices: Vec<usize>,
    pub freqs: Vec<IntVec>,
    pub bounds: FrameBounds,
    pub method: SelectionMethod,
}

impl SelectionProblem {
    pub fn new(pair: &AffinePair, n: usize, universe_cap: usize) -> Result<Self, TowerError> {
        let rt_n = pair.r().transpose().pow(n);
        let universe = complete_residues(&rt_n)?;
        if universe.len() > universe_cap {
            return Err(TowerError::SelectionCap {
                combinations: format!("universe {}", universe.len()),
                cap: universe_cap as u64,
            });
        }
        let digits = crate::triple::expansion_words(pair.b(), pair.r(), n);
        let target = digits.len();
        let scale = {
            let inv = pair.r().inverse()?;
            let mut acc = RatMatrix::identity(pair.dim());
            for _ in 0..n {
                acc = acc.mul(&inv);
            }
            acc
        };
        let full = build_fourier_matrix(&scale, &digits, &universe)?;
        Ok(Self {
            n,
            universe,
            digits,
            scale,
            target,
            full,
        })
    }

    pub fn universe(&self) -> &[IntVec] {
        &self.universe
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Frame bounds of the submatrix with the given universe rows.
    pub fn bounds_for(&self, indices: &[usize]) -> Result<FrameBounds, TowerError> {
        let freqs: Vec<IntVec> = indices.iter().map(|&i| self.universe[i].clone()).collect();
        let sub = build_fourier_matrix(&self.scale, &self.digits, &freqs)?;
        Ok(sub.frame_bounds()?)
    }

    /// Smallest eigenvalue of the row-side Gram of the selected rows; used
    /// as the greedy progress metric while the selection is still wide.
    fn row_gram_min(&self, indices: &[usize]) -> f64 {
        let k = indices.len();
        let mut gram = nalgebra::DMatrix::from_element(k, k, Complex64::default());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                let mut acc = Complex64::default();
                for c in 0..self.full.ncols() {
                    acc += self.full.data()[(i, c)] * self.full.data()[(j, c)].conj();
                }
                gram[(a, b)] = acc;
            }
        }
        gram.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &x| m.min(x))
    }

    fn result(&self, mut indices: Vec<usize>, method: SelectionMethod) -> Result<SelectionResult, TowerError> {
        indices.sort_unstable();
        let bounds = self.bounds_for(&indices)?;
        Ok(SelectionResult {
            freqs: indices.iter().map(|&i| self.universe[i].clone()).collect(),
            indices,
            bounds,
            method,
        })
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?.checked_div(i + 1)?;
    }
    Some(acc)
}

/// Scans every subset of the requested size, maximizing the lower frame
/// bound; ties break toward a larger lower/upper ratio, then toward the
/// lexicographically least index set. This is the oracle the heuristics
/// are measured against.
pub fn exhaustive_select(p: &SelectionProblem, comb_cap: u64) -> Result<SelectionResult, TowerError> {
    let n = p.universe.len();
    let k = p.target;
    assert!(k <= n, "target exceeds universe");
    let combinations = binomial(n as u64, k as u64).unwrap_or(u64::MAX);
    if combinations > comb_cap {
        return Err(TowerError::SelectionCap {
            combinations: combinations.to_string(),
            cap: comb_cap,
        });
    }
    let mut indices: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    loop {
        let bounds = p.bounds_for(&indices)?;
        let ratio = if bounds.upper > 0.0 {
            bounds.lower / bounds.upper
        } else {
            0.0
        };
        let better = match &best {
            None => true,
            // strict improvement keeps the lexicographically least subset
            Some((lo, ra, _)) => {
                bounds.lower > lo + 1e-14 || (bounds.lower > lo - 1e-14 && ratio > ra + 1e-14)
            }
        };
        if better {
            best = Some((bounds.lower, ratio, indices.clone()));
        }
        // next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                let (_, _, idx) = best.unwrap();
                return p.result(idx, SelectionMethod::Exhaustive);
            }
            i -= 1;
            if indices[i] != i + n - k {
                indices[i] += 1;
                for j in i + 1..k {
                    indices[j] = indices[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Greedy or random-swap selection; deterministic under the seed. Bounds
/// on the returned subset always come from a fresh eigensolve of the final
/// submatrix.
pub fn heuristic_select(
    p: &SelectionProblem,
    method: HeuristicMethod,
    seed: u64,
    iterations: usize,
) -> Result<SelectionResult, TowerError> {
    let n = p.universe.len();
    let k = p.target;
    match method {
        HeuristicMethod::Greedy => {
            let mut chosen: Vec<usize> = Vec::with_capacity(k);
            let mut remaining: Vec<usize> = (0..n).collect();
            while chosen.len() < k {
                let mut best: Option<(f64, usize)> = None;
                for (pos, &cand) in remaining.iter().enumerate() {
                    chosen.push(cand);
                    let score = p.row_gram_min(&chosen);
                    chosen.pop();
                    if best.map(|(s, _)| score > s + 1e-14).unwrap_or(true) {
                        best = Some((score, pos));
                    }
                }
                let (_, pos) = best.expect("nonempty remaining");
                chosen.push(remaining.remove(pos));
            }
            p.result(chosen, SelectionMethod::Greedy)
        }
        HeuristicMethod::RandomSwap => {
            let mut rng = Lcg::new(seed);
            // seeded random starting subset via partial Fisher-Yates
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = i + rng.next_index(n - i);
                pool.swap(i, j);
            }
            let mut chosen: Vec<usize> = pool[..k].to_vec();
            let mut outside: Vec<usize> = pool[k..].to_vec();
            let mut score = p.bounds_for(&chosen)?.lower;
            for _ in 0..iterations {
                if outside.is_empty() {
                    break;
                }
                let ci = rng.next_index(chosen.len());
                let oi = rng.next_index(outside.len());
                std::mem::swap(&mut chosen[ci], &mut outside[oi]);
                let new_score = p.bounds_for(&chosen)?.lower;
                if new_score > score + 1e-14 {
                    score = new_score;
                } else {
                    std::mem::swap(&mut chosen[ci], &mut outside[oi]);
                }
            }
            p.result(
                chosen,
                SelectionMethod::RandomSwap {
                    seed,
                    iterations,
                },
            )
        }
    }
}

/// `|det R|^n / N^n`: the tight-frame bound when the whole universe is
/// selected.
pub fn full_universe_bound(p: &SelectionProblem) -> f64 {
    p.universe.len() as f64 / p.target as f64
}

#[allow(unused)]
fn _int_vec_to_i64(v: &IntVec) -> Option<Vec<i64>> {
    v.iter().map(BigInt::to_i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::{DigitSet, IntMatrix};

    fn problem(r: i64, b: &[i64], n: usize) -> SelectionProblem {
        let pair = AffinePair::new(
            IntMatrix::from_rows(&[vec![r]]).unwrap(),
            DigitSet::from_scalars(b).unwrap(),
        )
        .unwrap();
        SelectionProblem::new(&pair, n, 10_000).unwrap()
    }

    #[test]
    fn middle_third_level_one_oracle() {
        let p = problem(3, &[0, 2], 1);
        assert_eq!(p.universe().len(), 3);
        assert_eq!(p.target(), 2);
        let r = exhaustive_select(&p, 1 << 20).unwrap();
        assert!((r.bounds.lower - 0.5).abs() < 1e-10, "{:?}", r.bounds);
        assert!((r.bounds.upper - 1.5).abs() < 1e-10, "{:?}", r.bounds);
        // all three subsets tie, so the lexicographically least wins
        assert_eq!(r.indices, vec![0, 1]);
    }

    #[test]
    fn complete_digits_reach_tight_bounds() {
        let p = problem(2, &[0, 1], 1);
        let r = exhaustive_select(&p, 1 << 20).unwrap();
        assert!((r.bounds.lower - 1.0).abs() < 1e-12);
        assert!((r.bounds.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jp_level_one_has_a_unitary_subset() {
        let p = problem(4, &[0, 2], 1);
        let r = exhaustive_select(&p, 1 << 20).unwrap();
        assert!((r.bounds.lower - 1.0).abs() < 1e-10, "{:?}", r.bounds);
        assert!((r.bounds.upper - 1.0).abs() < 1e-10, "{:?}", r.bounds);
    }

    #[test]
    fn full_universe_is_a_tight_frame() {
        let p = problem(3, &[0, 2], 1);
        let all: Vec<usize> = (0..3).collect();
        let bounds = p.bounds_for(&all).unwrap();
        let expect = full_universe_bound(&p);
        assert!((bounds.lower - expect).abs() < 1e-12);
        assert!((bounds.upper - expect).abs() < 1e-12);
    }

    #[test]
    fn heuristics_never_beat_the_oracle() {
        for n in 1..=2 {
            let p = problem(3, &[0, 2], n);
            let oracle = exhaustive_select(&p, 1 << 20).unwrap();
            let greedy = heuristic_select(&p, HeuristicMethod::Greedy, 0, 0).unwrap();
            let swap = heuristic_select(&p, HeuristicMethod::RandomSwap, 7, 500).unwrap();
            for h in [&greedy, &swap] {
                assert!(
                    h.bounds.lower <= oracle.bounds.lower + 1e-10,
                    "n={n}: heuristic {} beat oracle {}",
                    h.bounds.lower,
                    oracle.bounds.lower
                );
            }
        }
    }

    #[test]
    fn heuristics_near_oracle_on_level_two() {
        let p = problem(3, &[0, 2], 2);
        assert_eq!(p.universe().len(), 9);
        assert_eq!(p.target(), 4);
        let oracle = exhaustive_select(&p, 1 << 20).unwrap();
        let greedy = heuristic_select(&p, HeuristicMethod::Greedy, 0, 0).unwrap();
        let swap = heuristic_select(&p, HeuristicMethod::RandomSwap, 1, 2000).unwrap();
        for (name, h) in [("greedy", &greedy), ("swap", &swap)] {
            assert!(
                h.bounds.lower >= oracle.bounds.lower * 0.95,
                "{name} bound {} not within 5% of oracle {}",
                h.bounds.lower,
                oracle.bounds.lower
            );
        }
    }

    #[test]
    fn random_swap_is_seed_stable() {
        let p = problem(3, &[0, 2], 2);
        let a = heuristic_select(&p, HeuristicMethod::RandomSwap, 42, 300).unwrap();
        let b = heuristic_select(&p, HeuristicMethod::RandomSwap, 42, 300).unwrap();
        assert_eq!(a.indices, b.indices);
        assert_eq!(a.bounds, b.bounds);
        let c = heuristic_select(&p, HeuristicMethod::RandomSwap, 43, 300).unwrap();
        let _ = c; // different seed may or may not differ; determinism per seed is the contract
    }
}
