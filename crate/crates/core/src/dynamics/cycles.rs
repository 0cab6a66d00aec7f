//! Exact extreme-cycle enumeration and the spectra they generate.
//!
//! Candidate cycle points live in the dual of the smallest `R`-invariant
//! lattice containing `B`: extremeness propagates `<R^k b, c> in Z` along a
//! cycle, and the dual meets the invariant box in finitely many points. All
//! arithmetic is exact rational; an extreme transition out of a candidate
//! provably lands on another candidate, so cycle walks close inside the
//! finite candidate set.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};

use super::dynbox::{attractor_box, AttractorBox};
use super::{DynamicsError, TransitionSystem};
use crate::latmath::{dual_lattice, smallest_invariant_lattice, IntVec, RatVec};

/// An exact-rational cycle of the transition system on which the mask has
/// unit modulus everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeCycle {
    /// Digit word `(l_1, ..., l_m)` in the paper's convention: the last
    /// letter acts first, and the base point is fixed by the composition.
    pub word: Vec<usize>,
    pub word_vectors: Vec<IntVec>,
    /// Cycle points starting at the base point, in orbit order.
    pub points: Vec<RatVec>,
    pub base_point: RatVec,
}

impl ExtremeCycle {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All extreme cycles plus enumeration metadata.
#[derive(Debug)]
pub struct CycleEnumeration {
    pub cycles: Vec<ExtremeCycle>,
    pub candidates: usize,
    /// False when the candidate cap truncated the enumeration; the cycle
    /// list may then be incomplete.
    pub complete: bool,
    pub bounding_box: AttractorBox,
}

fn rat_key(v: &RatVec) -> Vec<(BigInt, BigInt)> {
    v.iter()
        .map(|q| (q.numer().clone(), q.denom().clone()))
        .collect()
}

/// Enumerates the lattice points of `dual` inside `bbox` exactly.
fn lattice_points_in_box(
    dual: &crate::latmath::Lattice,
    bbox: &AttractorBox,
    cap: usize,
) -> Result<(Vec<RatVec>, bool), DynamicsError> {
    let d = dual.dim();
    let basis = dual.basis_matrix()?; // rows are basis vectors
    // x = basis^T z  =>  z = (basis^T)^{-1} x; bound z over box corners
    let inv = basis.transpose().inverse()?;
    let mut z_lo = vec![BigRational::zero(); d];
    let mut z_hi = vec![BigRational::zero(); d];
    let mut first = true;
    for corner in 0..(1usize << d) {
        let x: RatVec = (0..d)
            .map(|i| {
                if corner >> i & 1 == 1 {
                    bbox.hi[i].clone()
                } else {
                    bbox.lo[i].clone()
                }
            })
            .collect();
        let z = inv.mat_vec(&x);
        for i in 0..d {
            if first || z[i] < z_lo[i] {
                z_lo[i] = z[i].clone();
            }
            if first || z[i] > z_hi[i] {
                z_hi[i] = z[i].clone();
            }
        }
        first = false;
    }
    let lo: Vec<BigInt> = z_lo.iter().map(|q| q.ceil().to_integer()).collect();
    let hi: Vec<BigInt> = z_hi.iter().map(|q| q.floor().to_integer()).collect();
    let mut count = BigInt::from(1);
    for i in 0..d {
        let width: BigInt = &hi[i] - &lo[i] + 1;
        if width.is_negative() || width.is_zero() {
            return Ok((Vec::new(), true));
        }
        count *= width;
    }
    let mut complete = true;
    if count.to_usize().map(|c| c > cap).unwrap_or(true) {
        complete = false;
    }
    let mut points = Vec::new();
    let mut z = lo.clone();
    let basis_t = basis.transpose();
    'outer: loop {
        let zr: RatVec = z
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let x = basis_t.mat_vec(&zr);
        if bbox.contains(&x) {
            points.push(x);
            if points.len() > cap {
                points.pop();
                complete = false;
                break 'outer;
            }
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            z[pos] += 1;
            if z[pos] <= hi[pos] {
                break;
            }
            z[pos] = lo[pos].clone();
        }
    }
    Ok((points, complete))
}

/// Enumerates every extreme cycle of the transition system, deduplicated up
/// to rotation (canonical representative: lexicographically least word
/// rotation).
pub fn enumerate_extreme_cycles(
    ts: &TransitionSystem,
    cap: usize,
) -> Result<CycleEnumeration, DynamicsError> {
    let t = ts.triple();
    let lattice = smallest_invariant_lattice(t.r(), t.b())?;
    let dual = dual_lattice(&lattice)?;
    let bbox = attractor_box(&ts.rt(), t.l())?;
    let (candidates, complete) = lattice_points_in_box(&dual, &bbox, cap)?;
    // keep candidates with |m_B| = 1, i.e. <b, x> integral for all b
    let extreme: Vec<RatVec> = candidates
        .iter()
        .filter(|x| ts.mask().unit_modulus_exact(x))
        .cloned()
        .collect();
    let index: HashMap<Vec<(BigInt, BigInt)>, usize> = extreme
        .iter()
        .enumerate()
        .map(|(i, x)| (rat_key(x), i))
        .collect();
    let n_l = t.l().len();
    // unique extreme successor (QMF forces at most one)
    let mut next: Vec<Option<(usize, usize)>> = Vec::with_capacity(extreme.len());
    for x in &extreme {
        let mut found: Option<(usize, usize)> = None;
        let mut hits = 0;
        for ell in 0..n_l {
            let y = ts.tau(ell, x);
            if ts.mask().unit_modulus_exact(&y) {
                hits += 1;
                if let Some(&target) = index.get(&rat_key(&y)) {
                    found = Some((ell, target));
                }
            }
        }
        if hits > 1 {
            return Err(DynamicsError::MultipleExtremeTransitions(hits));
        }
        next.push(found);
    }
    // cycle extraction over the partial functional graph
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; extreme.len()];
    let mut cycles = Vec::new();
    for start in 0..extreme.len() {
        if color[start] != WHITE {
            continue;
        }
        let mut path = Vec::new();
        let mut at = start;
        loop {
            if color[at] == GRAY {
                // found a new cycle: the tail of `path` from `at`
                let pos = path.iter().position(|&(i, _)| i == at).unwrap();
                let cycle_nodes: Vec<(usize, usize)> = path[pos..].to_vec();
                cycles.push(build_cycle(ts, &extreme, &cycle_nodes));
                break;
            }
            if color[at] == BLACK {
                break;
            }
            color[at] = GRAY;
            match next[at] {
                Some((ell, target)) => {
                    path.push((at, ell));
                    at = target;
                }
                None => break,
            }
        }
        for (i, _) in path {
            color[i] = BLACK;
        }
        color[at] = BLACK;
        if color[start] == GRAY {
            color[start] = BLACK;
        }
    }
    cycles.sort_by(|a, b| {
        (a.len(), &a.word, rat_key(&a.base_point)).cmp(&(b.len(), &b.word, rat_key(&b.base_point)))
    });
    // exact invariants: closure, extremeness, membership
    for c in &cycles {
        debug_assert_eq!(ts.tau_word(&c.word, &c.base_point), c.base_point);
        for p in &c.points {
            debug_assert!(bbox.contains(p));
            debug_assert!(ts.mask().unit_modulus_exact(p));
        }
    }
    Ok(CycleEnumeration {
        cycles,
        candidates: extreme.len(),
        complete,
        bounding_box: bbox,
    })
}

/// Builds the canonical representative of a cycle from its walk
/// `(node, out-letter)` pairs.
fn build_cycle(
    ts: &TransitionSystem,
    points: &[RatVec],
    walk: &[(usize, usize)],
) -> ExtremeCycle {
    let m = walk.len();
    let mut best: Option<ExtremeCycle> = None;
    for rot in 0..m {
        let ordered: Vec<(usize, usize)> = (0..m).map(|k| walk[(rot + k) % m]).collect();
        let cycle_points: Vec<RatVec> =
            ordered.iter().map(|&(node, _)| points[node].clone()).collect();
        // paper convention: word = reversed walk letters, so that
        // tau_{l_1...l_m} (last letter first) fixes the base point
        let word: Vec<usize> = ordered.iter().rev().map(|&(_, ell)| ell).collect();
        let candidate = ExtremeCycle {
            word_vectors: word
                .iter()
                .map(|&i| ts.triple().l().vectors()[i].clone())
                .collect(),
            word,
            base_point: cycle_points[0].clone(),
            points: cycle_points,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                (&candidate.word, rat_key(&candidate.base_point))
                    < (&b.word, rat_key(&b.base_point))
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.unwrap()
}

/// The orthonormal set generated by the extreme cycles, truncated at word
/// length `level`:
/// `{ l_0 + R^T l_1 + ... + (R^T)^{t-1} l_{t-1} + (R^T)^t (-c) : t <= level }`.
///
/// Built by the Horner recursion `S_{t} = L + R^T S_{t-1}` from
/// `S_0 = {-c}`, deduplicated and sorted.
pub fn dynamically_simple_spectrum(
    ts: &TransitionSystem,
    cycles: &[ExtremeCycle],
    level: usize,
    cap: usize,
) -> Result<Vec<RatVec>, DynamicsError> {
    let rt = ts.rt().to_rat();
    let l = ts.triple().l();
    let mut frontier: Vec<RatVec> = Vec::new();
    for c in cycles {
        for p in &c.points {
            frontier.push(p.iter().map(|q| -q).collect());
        }
    }
    dedup_sorted(&mut frontier);
    let mut out = frontier.clone();
    for _ in 0..level {
        let mut next = Vec::with_capacity(frontier.len() * l.len());
        for x in &frontier {
            let rx = rt.mat_vec(x);
            for ell in l.iter() {
                let v: RatVec = rx
                    .iter()
                    .zip(ell)
                    .map(|(a, li)| a + BigRational::from_integer(li.clone()))
                    .collect();
                next.push(v);
            }
        }
        dedup_sorted(&mut next);
        if next.len() > cap || out.len() + next.len() > cap {
            return Err(DynamicsError::SizeCap { cap });
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    dedup_sorted(&mut out);
    Ok(out)
}

fn dedup_sorted(v: &mut Vec<RatVec>) {
    v.sort_by(|a, b| rat_key(a).cmp(&rat_key(b)));
    v.dedup();
}

/// Closure of rational seeds under possible transitions (`m_B` not exactly
/// zero at the image).
#[derive(Debug)]
pub struct ClosureResult {
    pub points: Vec<RatVec>,
    /// False when the cap stopped the expansion.
    pub complete: bool,
    /// True when every transition decision was exact (no numeric
    /// threshold fallback); only then can closures support a NotSimple
    /// verdict.
    pub exact_only: bool,
}

pub fn invariant_closure(
    ts: &TransitionSystem,
    seeds: &[RatVec],
    cap: usize,
) -> Result<ClosureResult, DynamicsError> {
    // breadth-first so denominators grow with tree depth, not point count;
    // rationals past the bit guard are treated like a cap hit
    const DENOM_BIT_GUARD: u64 = 512;
    let mut seen: HashMap<Vec<(BigInt, BigInt)>, ()> = HashMap::new();
    let mut queue: std::collections::VecDeque<RatVec> = std::collections::VecDeque::new();
    let mut points = Vec::new();
    let mut exact_only = true;
    for s in seeds {
        if seen.insert(rat_key(s), ()).is_none() {
            queue.push_back(s.clone());
            points.push(s.clone());
        }
    }
    let mut complete = true;
    while let Some(x) = queue.pop_front() {
        if x.iter().any(|q| q.denom().bits() > DENOM_BIT_GUARD) {
            complete = false;
            continue;
        }
        for ell in 0..ts.triple().l().len() {
            let y = ts.tau(ell, &x);
            let possible = match ts.mask().is_zero_exact(&y) {
                Some(zero) => !zero,
                None => {
                    exact_only = false;
                    ts.mask().eval_rational(&y).norm() > crate::fourier::DEFAULT_TOL
                }
            };
            if possible && seen.insert(rat_key(&y), ()).is_none() {
                if points.len() >= cap {
                    complete = false;
                    continue;
                }
                points.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    dedup_sorted(&mut points);
    Ok(ClosureResult {
        points,
        complete,
        exact_only,
    })
}

/// Three-valued dynamical-simplicity verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum SimplicityVerdict {
    /// Certified: one-dimensional systems are always dynamically simple.
    Simple,
    /// A closed invariant set disjoint from every extreme cycle exists;
    /// the witnessing seed is reported.
    NotSimple { witness_seed: RatVec },
    Unknown { reason: String },
}

/// Probes dynamical simplicity: a complete, exactly-decided closure
/// disjoint from all extreme cycles proves NotSimple. Requires the cycle
/// enumeration to have been complete.
pub fn simplicity_probe(
    ts: &TransitionSystem,
    enumeration: &CycleEnumeration,
    seeds: &[RatVec],
    cap: usize,
) -> Result<SimplicityVerdict, DynamicsError> {
    if ts.triple().dim() == 1 {
        return Ok(SimplicityVerdict::Simple);
    }
    if !enumeration.complete {
        return Ok(SimplicityVerdict::Unknown {
            reason: "cycle enumeration hit the candidate cap".into(),
        });
    }
    let cycle_keys: Vec<Vec<(BigInt, BigInt)>> = enumeration
        .cycles
        .iter()
        .flat_map(|c| c.points.iter().map(rat_key))
        .collect();
    let mut tainted = false;
    for seed in seeds {
        let closure = invariant_closure(ts, std::slice::from_ref(seed), cap)?;
        if !closure.complete || !closure.exact_only {
            tainted = true;
            continue;
        }
        let disjoint = closure
            .points
            .iter()
            .all(|p| !cycle_keys.contains(&rat_key(p)));
        if disjoint {
            return Ok(SimplicityVerdict::NotSimple {
                witness_seed: seed.clone(),
            });
        }
    }
    Ok(SimplicityVerdict::Unknown {
        reason: if tainted {
            "some closures hit caps or used numeric thresholds".into()
        } else {
            "no probed seed produced a disjoint closed set".into()
        },
    })
}
