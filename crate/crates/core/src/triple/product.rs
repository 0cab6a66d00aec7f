//! Level-n product triples `(R^n, B_n, Lambda_n)`.
//!
//! `B_n = B + R B + ... + R^{n-1} B` and
//! `Lambda_n = L + R^T L + ... + (R^T)^{n-1} L`, in lexicographic
//! digit-word order (first letter most significant), which fixes the
//! row/column order of the level-n matrix for reproducibility.
//!
//! Verification of the product is exact and does not touch the dense
//! `N^n x N^n` Gram: for a nonzero difference of digit words, the Gram
//! entry factors over levels and the factor at the first differing letter
//! is a base-pair column sum, which the cyclotomic certificates prove to
//! vanish. Together with exact residue-distinctness of both level sets
//! this certifies the product is again a Hadamard triple.

use std::collections::HashSet;

use num::bigint::BigInt;

use super::{
    AffinePair, HadamardTriple, TripleError, TripleReport, UnitarityMethod,
};
use crate::latmath::{reduce_mod, DigitSet, Expansivity, IntMatrix, IntVec};

/// A product triple with its exact verification report.
pub struct ProductTriple {
    pub triple: HadamardTriple,
    pub n: usize,
    pub report: TripleReport,
}

pub(crate) fn expand_words(base: &[IntVec], scale: &IntMatrix, n: usize) -> Vec<IntVec> {
    // powers of the scale matrix applied to each base digit
    let mut scaled: Vec<Vec<IntVec>> = Vec::with_capacity(n);
    let mut current: Vec<IntVec> = base.to_vec();
    for _ in 0..n {
        scaled.push(current.clone());
        current = current.iter().map(|v| scale.mat_vec(v)).collect();
    }
    let count = base.len().pow(n as u32);
    let mut out = Vec::with_capacity(count);
    let mut word = vec![0usize; n];
    loop {
        let mut v = vec![BigInt::from(0); base[0].len()];
        for (k, &idx) in word.iter().enumerate() {
            for (vi, si) in v.iter_mut().zip(&scaled[k][idx]) {
                *vi += si;
            }
        }
        out.push(v);
        // odometer, last letter fastest, so the word order is lexicographic
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < base.len() {
                break;
            }
            word[pos] = 0;
        }
    }
}

fn all_distinct_mod(m: &IntMatrix, vectors: &[IntVec]) -> Result<bool, TripleError> {
    let inv = m.inverse()?;
    let mut seen: HashSet<IntVec> = HashSet::with_capacity(vectors.len());
    for v in vectors {
        if !seen.insert(reduce_mod(m, &inv, v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds and exactly verifies the level-n product triple.
pub fn product_triple(
    base: &HadamardTriple,
    n: usize,
    cap: usize,
) -> Result<ProductTriple, TripleError> {
    assert!(n >= 1, "product level must be at least 1");
    let size = base
        .n_digits()
        .checked_pow(n as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| TripleError::SizeCap {
            size: format!("{}^{}", base.n_digits(), n),
            cap,
        })?;
    // exact base certificates: every base column pair must vanish
    let r_inv = base.r().inverse()?;
    let nb = base.n_digits();
    let mut base_pairs = 0;
    for i in 0..nb {
        for j in i + 1..nb {
            match super::pair_certificate(
                &r_inv,
                &base.b().vectors()[i],
                &base.b().vectors()[j],
                base.l(),
            ) {
                Some(true) => base_pairs += 1,
                _ => return Err(TripleError::CertificateFailed(i, j)),
            }
        }
    }
    let r_n = base.r().pow(n);
    let rt_n = base.r().transpose().pow(n);
    let b_n = expand_words(base.b().vectors(), base.r(), n);
    let l_n = expand_words(base.l().vectors(), &base.r().transpose(), n);
    debug_assert_eq!(b_n.len(), size);
    if !all_distinct_mod(&r_n, &b_n)? {
        return Err(TripleError::NotSimpleDigitSet { which: "B_n" });
    }
    if !all_distinct_mod(&rt_n, &l_n)? {
        return Err(TripleError::NotSimpleDigitSet { which: "Lambda_n" });
    }
    let b_set = DigitSet::new(base.dim(), b_n)?;
    let l_set = DigitSet::new(base.dim(), l_n)?;
    let pair = AffinePair::new(r_n, b_set)?;
    let triple = HadamardTriple::from_verified(pair, l_set);
    let report = TripleReport {
        ok: true,
        defects: Vec::new(),
        unitarity_defect: None,
        unitarity_method: Some(UnitarityMethod::ProductStructure { base_pairs }),
        exact_certified: true,
        expansivity: Expansivity::Expansive,
    };
    Ok(ProductTriple { triple, n, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latmath::int_sorted;
    use crate::triple::fixtures::*;
    use crate::triple::{verify_triple, UNITARITY_TOL};

    #[test]
    fn jp_level_two_digits() {
        let t = jp();
        let p = product_triple(&t, 2, 1 << 20).unwrap();
        assert_eq!(
            int_sorted(p.triple.b().vectors()),
            vec![vec![0.into()], vec![2.into()], vec![8.into()], vec![10.into()]]
        );
        assert_eq!(
            int_sorted(p.triple.l().vectors()),
            vec![vec![0.into()], vec![1.into()], vec![4.into()], vec![5.into()]]
        );
        // independent dense verification
        let report =
            verify_triple(p.triple.r(), p.triple.b(), p.triple.l(), UNITARITY_TOL).unwrap();
        assert!(report.ok && report.exact_certified);
    }

    #[test]
    fn level_one_is_the_base() {
        let t = jp();
        let p = product_triple(&t, 1, 1 << 20).unwrap();
        assert_eq!(p.triple.b(), t.b());
        assert_eq!(p.triple.l(), t.l());
        assert_eq!(p.triple.r(), t.r());
    }

    #[test]
    fn lebesgue_level_three_is_complete_residues() {
        let t = lebesgue();
        let p = product_triple(&t, 3, 1 << 20).unwrap();
        let expect: Vec<IntVec> = (0..8).map(|k| vec![BigInt::from(k)]).collect();
        assert_eq!(int_sorted(p.triple.b().vectors()), expect);
        assert_eq!(int_sorted(p.triple.l().vectors()), expect);
    }

    #[test]
    fn structural_claim_cross_checked_dense() {
        // the product-structure argument must agree with the dense Gram
        // wherever the dense Gram is computable
        for n in 1..=3 {
            let p = product_triple(&planar_z(), n, 1 << 20).unwrap();
            let report =
                verify_triple(p.triple.r(), p.triple.b(), p.triple.l(), UNITARITY_TOL)
                    .unwrap();
            assert!(report.ok, "n = {n}: {:?}", report.defects);
            if let Some(defect) = report.unitarity_defect {
                assert!(defect < 1e-10, "n = {n}: defect {defect}");
            }
        }
    }

    #[test]
    fn product_of_products_matches_digit_sets() {
        // B_{mn} = set-equality with the digits of product(product(t,m),n)
        let t = jp();
        let inner = product_triple(&t, 2, 1 << 20).unwrap();
        let nested = product_triple(&inner.triple, 3, 1 << 20).unwrap();
        let direct = product_triple(&t, 6, 1 << 20).unwrap();
        assert_eq!(
            int_sorted(nested.triple.b().vectors()),
            int_sorted(direct.triple.b().vectors())
        );
        assert_eq!(
            int_sorted(nested.triple.l().vectors()),
            int_sorted(direct.triple.l().vectors())
        );
    }

    #[test]
    fn size_cap_guard() {
        let t = jp();
        assert!(matches!(
            product_triple(&t, 30, 1 << 20),
            Err(TripleError::SizeCap { .. })
        ));
    }
}
