//! Leveled frequency sets with provenance.

use num::traits::Zero;

use super::SpectrumError;
use crate::latmath::{IntVec, RatVec};
use crate::triple::HadamardTriple;

/// Where a candidate's levels came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// `Lambda_n = L + R^T L + ... + (R^T)^{n-1} L`.
    Canonical,
    /// Generated by the extreme cycles.
    CycleGenerated,
    /// Canonical blocks with integer offsets `j -> j + (R^T)^{n_k} k(j)`;
    /// the nonzero shifts per level are recorded.
    OffsetModified {
        shifts: Vec<Vec<(IntVec, IntVec)>>,
    },
}

/// Nested integer frequency sets `Lambda_1 ⊆ Lambda_2 ⊆ ...` with the
/// scale exponent attached to each level (the exponent `e` for which
/// `(R^T)^{-e} Lambda_level` enters the completeness constant).
#[derive(Clone, Debug)]
pub struct SpectrumCandidate {
    levels: Vec<Vec<IntVec>>,
    exponents: Vec<usize>,
    pub provenance: Provenance,
}

impl SpectrumCandidate {
    pub fn new(
        levels: Vec<Vec<IntVec>>,
        exponents: Vec<usize>,
        provenance: Provenance,
    ) -> Self {
        assert_eq!(levels.len(), exponents.len());
        debug_assert!(levels.windows(2).all(|w| is_subset(&w[0], &w[1])));
        debug_assert!(levels
            .first()
            .map(|l0| l0.iter().any(|v| v.iter().all(|x| x.is_zero())))
            .unwrap_or(true));
        Self {
            levels,
            exponents,
            provenance,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<IntVec>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&[IntVec], SpectrumError> {
        self.levels
            .get(i)
            .map(Vec::as_slice)
            .ok_or(SpectrumError::LevelOutOfRange(i))
    }

    /// Scale exponent of level `i`.
    pub fn exponent(&self, i: usize) -> usize {
        self.exponents[i]
    }

    /// The deepest level (the union, by nesting).
    pub fn top(&self) -> &[IntVec] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

fn is_subset(small: &[IntVec], large: &[IntVec]) -> bool {
    // levels are kept sorted
    small.iter().all(|v| large.binary_search(v).is_ok())
}

/// Canonical nested levels up to `depth`, deduplicated and sorted.
pub fn canonical_levels(
    t: &HadamardTriple,
    depth: usize,
    cap: usize,
) -> Result<SpectrumCandidate, SpectrumError> {
    let rt = t.r().transpose();
    let mut levels: Vec<Vec<IntVec>> = Vec::with_capacity(depth);
    let mut current: Vec<IntVec> = t.l().vectors().to_vec();
    current.sort();
    let mut power = rt.clone();
    for k in 1..=depth {
        if current.len() > cap {
            return Err(SpectrumError::SizeCap { cap });
        }
        levels.push(current.clone());
        if k == depth {
            break;
        }
        let mut next: Vec<IntVec> = Vec::with_capacity(current.len() * t.l().len());
        for lam in &current {
            for ell in t.l().iter() {
                let shifted: IntVec = power
                    .mat_vec(ell)
                    .iter()
                    .zip(lam)
                    .map(|(a, b)| a + b)
                    .collect();
                next.push(shifted);
            }
        }
        next.sort();
        next.dedup();
        current = next;
        power = power.mul(&rt);
    }
    Ok(SpectrumCandidate::new(
        levels,
        (1..=depth).collect(),
        Provenance::Canonical,
    ))
}

/// Wraps a cycle-generated set (from the dynamics module) as a candidate.
/// Fails when a frequency is not an integer vector, which only happens
/// outside the reduced setting where the invariant lattice is `Z^d`.
pub fn cycle_generated_candidate(
    levels: Vec<Vec<RatVec>>,
) -> Result<SpectrumCandidate, SpectrumError> {
    let mut integer_levels = Vec::with_capacity(levels.len());
    for level in levels {
        let mut iv: Vec<IntVec> = Vec::with_capacity(level.len());
        for v in level {
            if v.iter().any(|q| !q.is_integer()) {
                return Err(SpectrumError::NonIntegerFrequency(
                    super::rat_point_display(&v),
                ));
            }
            iv.push(v.iter().map(|q| q.to_integer()).collect());
        }
        iv.sort();
        iv.dedup();
        integer_levels.push(iv);
    }
    let exponents = (1..=integer_levels.len()).collect();
    Ok(SpectrumCandidate::new(
        integer_levels,
        exponents,
        Provenance::CycleGenerated,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::int_vec;
    use crate::triple::fixtures::*;

    #[test]
    fn jp_canonical_level_two() {
        let cand = canonical_levels(&jp(), 2, 1 << 20).unwrap();
        assert_eq!(
            cand.level(1).unwrap(),
            &[int_vec(&[0]), int_vec(&[1]), int_vec(&[4]), int_vec(&[5])]
        );
        assert_eq!(cand.exponent(1), 2);
    }

    #[test]
    fn lebesgue_canonical_level_three_is_zero_to_seven() {
        let cand = canonical_levels(&lebesgue(), 3, 1 << 20).unwrap();
        let expect: Vec<IntVec> = (0..8).map(|k| int_vec(&[k])).collect();
        assert_eq!(cand.level(2).unwrap(), &expect[..]);
    }

    #[test]
    fn level_one_is_l_itself() {
        let t = planar_z();
        let cand = canonical_levels(&t, 1, 1 << 20).unwrap();
        let mut l = t.l().vectors().to_vec();
        l.sort();
        assert_eq!(cand.level(0).unwrap(), &l[..]);
    }

    #[test]
    fn levels_are_nested() {
        let cand = canonical_levels(&planar_z(), 4, 1 << 20).unwrap();
        for w in cand.levels().windows(2) {
            for v in &w[0] {
                assert!(w[1].binary_search(v).is_ok());
            }
        }
    }
}
