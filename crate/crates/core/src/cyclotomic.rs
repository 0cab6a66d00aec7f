//! Exact vanishing tests for sums of roots of unity.
//!
//! A sum `sum_i e^{2 pi i q_i}` with rational phases lives in `Z[zeta_D]`
//! for `D = lcm` of the denominators. Writing `zeta_D^n` through the CRT as
//! a product of prime-power roots and expanding each factor in the standard
//! power basis of `Z[zeta_{p^a}]` (exponents below `phi(p^a)`, using
//! `Phi_{p^a}` to rewrite larger ones) gives coordinates in a genuine
//! integral basis of the tensor product, so the sum vanishes iff every
//! coordinate does. This decides vanishing exactly for arbitrary `D` whose
//! prime factors we can find; it never approximates.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

/// Largest prime factor the trial-division factorizer will look for.
const FACTOR_LIMIT: u64 = 1_000_003;

/// Outcome of the exact vanishing test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouSum {
    Zero,
    Nonzero,
}

fn factorize(mut n: BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut factors = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if p.to_u64().map(|v| v > FACTOR_LIMIT).unwrap_or(true) {
            break;
        }
        if (&n % &p).is_zero() {
            let mut a = 0u32;
            while (&n % &p).is_zero() {
                n /= &p;
                a += 1;
            }
            factors.push((p.clone(), a));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        // leftover must itself be prime to be usable; it is if below the
        // square of the trial bound
        if n < BigInt::from(FACTOR_LIMIT) * BigInt::from(FACTOR_LIMIT) {
            factors.push((n, 1));
        } else {
            return None;
        }
    }
    Some(factors)
}

/// Decides whether `sum_i e^{2 pi i phases[i]}` is exactly zero.
///
/// Returns `None` only when the common denominator has a prime factor
/// beyond the factorization limit.
pub fn rou_sum_is_zero(phases: &[BigRational]) -> Option<RouSum> {
    if phases.is_empty() {
        return Some(RouSum::Zero);
    }
    let mut d = BigInt::one();
    for q in phases {
        d = d.lcm(q.denom());
    }
    // exponents mod D
    let exponents: Vec<BigInt> = phases
        .iter()
        .map(|q| {
            let n = q.numer() * (&d / q.denom());
            n.mod_floor(&d)
        })
        .collect();
    if d.is_one() {
        // all phases integral: sum = count != 0
        return Some(RouSum::Nonzero);
    }
    let factors = factorize(d.clone())?;
    let prime_powers: Vec<BigInt> = factors.iter().map(|(p, a)| p.pow(*a)).collect();
    // CRT coefficients: m_p = n * (D/p^a)^{-1} mod p^a
    let crt_mul: Vec<BigInt> = prime_powers
        .iter()
        .map(|pa| {
            let q = &d / pa;
            mod_inverse(&q.mod_floor(pa), pa)
        })
        .collect();

    // coefficient map: key = basis exponents per prime power
    let mut coeffs: HashMap<Vec<BigInt>, BigInt> = HashMap::new();
    for n in &exponents {
        // residue exponent per prime power
        let exps: Vec<BigInt> = prime_powers
            .iter()
            .zip(&crt_mul)
            .map(|(pa, inv)| (n.mod_floor(pa) * inv).mod_floor(pa))
            .collect();
        // expand into the power basis, one prime at a time
        let mut terms: Vec<(Vec<BigInt>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        for (idx, (p, _)) in factors.iter().enumerate() {
            let pa = &prime_powers[idx];
            let phi = pa / p * (p - BigInt::one());
            let p_lower = pa / p; // p^{a-1}
            let e = &exps[idx];
            let mut expanded = Vec::new();
            for (key, sign) in &terms {
                if e < &phi {
                    let mut k = key.clone();
                    k.push(e.clone());
                    expanded.push((k, sign.clone()));
                } else {
                    // zeta^{phi+s} = -(zeta^s + zeta^{s+p^{a-1}} + ... ), p-1 terms
                    let s = e - &phi;
                    let p_usize = p.to_u64().expect("prime fits u64");
                    for t in 0..(p_usize - 1) {
                        let mut k = key.clone();
                        k.push(&s + &p_lower * BigInt::from(t));
                        expanded.push((k, -sign.clone()));
                    }
                }
            }
            terms = expanded;
        }
        for (key, sign) in terms {
            *coeffs.entry(key).or_insert_with(BigInt::zero) += sign;
        }
    }
    if coeffs.values().all(|c| c.is_zero()) {
        Some(RouSum::Zero)
    } else {
        Some(RouSum::Nonzero)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "non-invertible CRT coefficient");
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn halves_cancel() {
        // 1 + e^{pi i} = 0
        assert_eq!(
            rou_sum_is_zero(&[rat(0, 1), rat(1, 2)]),
            Some(RouSum::Zero)
        );
    }

    #[test]
    fn full_orbit_cancels() {
        // sum of all cube roots of unity
        assert_eq!(
            rou_sum_is_zero(&[rat(0, 1), rat(1, 3), rat(2, 3)]),
            Some(RouSum::Zero)
        );
        // sum of all 12th roots
        let phases: Vec<_> = (0..12).map(|k| rat(k, 12)).collect();
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Zero));
    }

    #[test]
    fn partial_orbits_do_not_cancel() {
        assert_eq!(
            rou_sum_is_zero(&[rat(0, 1), rat(1, 3)]),
            Some(RouSum::Nonzero)
        );
        assert_eq!(
            rou_sum_is_zero(&[rat(1, 5), rat(2, 5), rat(3, 5)]),
            Some(RouSum::Nonzero)
        );
        assert_eq!(rou_sum_is_zero(&[rat(0, 1)]), Some(RouSum::Nonzero));
    }

    #[test]
    fn composite_cancellation() {
        // (1 + e^{pi i}) * (1 + e^{2 pi i /3}e^{...}) style product expanded:
        // {0, 1/2} + {0, 1/3} pointwise sums all cancel in pairs
        let phases = vec![rat(0, 1), rat(1, 3), rat(1, 2), rat(5, 6)];
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Zero));
        // same multiset with one term nudged
        let phases = vec![rat(0, 1), rat(1, 3), rat(1, 2), rat(1, 6)];
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Nonzero));
    }

    #[test]
    fn vanishing_sum_with_repeats() {
        // 2 * (sum of cube roots): repeats allowed
        let phases = vec![
            rat(0, 1),
            rat(0, 1),
            rat(1, 3),
            rat(1, 3),
            rat(2, 3),
            rat(2, 3),
        ];
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Zero));
    }

    #[test]
    fn large_two_power_denominators() {
        // e^{2 pi i /2^40} - e^{2 pi i (2^39+1)/2^40} = 0 shifted by half turn
        let d: i64 = 1 << 40;
        let phases = vec![rat(1, d), rat((d / 2) + 1, d)];
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Zero));
        let phases = vec![rat(1, d), rat((d / 2) + 3, d)];
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Nonzero));
    }

    #[test]
    fn minimal_vanishing_five_term() {
        // primitive 5th roots plus 1: Phi_5 relation
        let phases: Vec<_> = (0..5).map(|k| rat(k, 5)).collect();
        assert_eq!(rou_sum_is_zero(&phases), Some(RouSum::Zero));
    }
}
