//! Almost-Parseval-frame towers: construction from `(M, K, alpha)` level
//! specs, level verification against the singular-value sandwich, tower
//! transforms and frame spectra, and frame-bounded subset selection.

mod select;

pub use select::{
    exhaustive_select, heuristic_select, HeuristicMethod, SelectionMethod, SelectionProblem,
    SelectionResult,
};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use thiserror::Error;

use crate::fourier::{build_fourier_matrix, FourierError, FrameBounds};
use crate::latmath::{IntVec, LatticeError, RatMatrix};
use crate::triple::TripleError;

#[derive(Debug, Error)]
pub enum TowerError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Triple(#[from] Box<TripleError>),
    #[error(
        "level {index}: epsilon = {eps:.6} >= 1 gives no usable frame bound; \
         needs K >= {suggested_k}"
    )]
    EpsilonTooLarge {
        index: usize,
        eps: f64,
        suggested_k: u64,
    },
    #[error("level {index}: invalid spec ({reason})")]
    BadSpec { index: usize, reason: String },
    #[error("digits must lie in 0..N and contain 0")]
    BadLevelData,
    #[error("tower has {built} levels, requested {requested}")]
    LevelOutOfRange { built: usize, requested: usize },
    #[error("combination count {combinations} exceeds cap {cap}")]
    SelectionCap { combinations: String, cap: u64 },
    #[error("frequency values overflow i64")]
    Overflow,
}

impl From<TripleError> for TowerError {
    fn from(e: TripleError) -> Self {
        TowerError::Triple(Box::new(e))
    }
}

/// One construction spec `N = M K + alpha` with `0 <= alpha < M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub m: u64,
    pub k: u64,
    pub alpha: u64,
}

/// A built tower level: modulus `N`, digits `B`, pre-spectrum digits `L`,
/// and the frame-bound slack `eps`.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub n: u64,
    pub b: Vec<u64>,
    pub l: Vec<u64>,
    pub eps: f64,
    /// Measured slack `max(1 - sigma_min, sigma_max - 1)` of the level
    /// matrix; always at most `eps` for constructed levels.
    pub eps_measured: f64,
    pub bounds: FrameBounds,
}

impl TowerLevel {
    pub fn m(&self) -> usize {
        self.b.len()
    }
}

/// A finite almost-Parseval-frame tower; the built horizon carries a
/// finite epsilon sum by construction.
#[derive(Clone, Debug)]
pub struct Tower {
    pub levels: Vec<TowerLevel>,
    pub eps_sum: f64,
}

/// Verification data for one level.
#[derive(Clone, Copy, Debug)]
pub struct ApfLevelReport {
    pub bounds: FrameBounds,
    pub eps_measured: f64,
}

/// Measures the singular-value sandwich of the level matrix
/// `(1/sqrt M)[e^{2 pi i b l / N}]`.
pub fn verify_apf_level(n: u64, b: &[u64], l: &[u64]) -> Result<ApfLevelReport, TowerError> {
    if n < 2 || b.is_empty() || l.is_empty() {
        return Err(TowerError::BadLevelData);
    }
    if !b.contains(&0) || !l.contains(&0) || b.iter().any(|&x| x >= n) {
        return Err(TowerError::BadLevelData);
    }
    let scale = RatMatrix::from_entries(
        1,
        1,
        vec![BigRational::new(BigInt::from(1), BigInt::from(n))],
    );
    let digits: Vec<IntVec> = b.iter().map(|&x| vec![BigInt::from(x)]).collect();
    let freqs: Vec<IntVec> = l.iter().map(|&x| vec![BigInt::from(x)]).collect();
    let matrix = build_fourier_matrix(&scale, &digits, &freqs)?;
    let bounds = matrix.frame_bounds()?;
    let eps_measured = (1.0 - bounds.lower.max(0.0).sqrt()).max(bounds.upper.sqrt() - 1.0);
    Ok(ApfLevelReport {
        bounds,
        eps_measured,
    })
}

/// Operator norm of `F - H` for a constructed level, where `H` is the
/// exact Hadamard matrix at modulus `M K`; the construction guarantees
/// this is at most `2 pi alpha sqrt(M) / K`.
pub fn level_perturbation_norm(spec: &LevelSpec) -> Result<(f64, f64), TowerError> {
    let (n, b, l) = spec_digits(spec)?;
    let digits: Vec<IntVec> = b.iter().map(|&x| vec![BigInt::from(x)]).collect();
    let freqs: Vec<IntVec> = l.iter().map(|&x| vec![BigInt::from(x)]).collect();
    let scale_n = RatMatrix::from_entries(
        1,
        1,
        vec![BigRational::new(BigInt::from(1), BigInt::from(n))],
    );
    let scale_mk = RatMatrix::from_entries(
        1,
        1,
        vec![BigRational::new(BigInt::from(1), BigInt::from(spec.m * spec.k))],
    );
    let f = build_fourier_matrix(&scale_n, &digits, &freqs)?;
    let h = build_fourier_matrix(&scale_mk, &digits, &freqs)?;
    let diff = f.data() - h.data();
    let measured = diff.singular_values().max();
    let bound = std::f64::consts::TAU * spec.alpha as f64 * (spec.m as f64).sqrt()
        / spec.k as f64;
    Ok((measured, bound))
}

fn spec_digits(spec: &LevelSpec) -> Result<(u64, Vec<u64>, Vec<u64>), TowerError> {
    if spec.m < 1 || spec.k < 1 {
        return Err(TowerError::BadSpec {
            index: 0,
            reason: "M and K must be positive".into(),
        });
    }
    if spec.alpha >= spec.m {
        return Err(TowerError::BadSpec {
            index: 0,
            reason: format!("alpha = {} must be < M = {}", spec.alpha, spec.m),
        });
    }
    let n = spec.m * spec.k + spec.alpha;
    let b: Vec<u64> = (0..spec.m).map(|i| i * spec.k).collect();
    let l: Vec<u64> = (0..spec.m).collect();
    Ok((n, b, l))
}

/// Builds a tower from construction specs: level `j` has
/// `N_j = M_j K_j + alpha_j`, `B_j = {0, K_j, ..., (M_j - 1) K_j}`,
/// `L_j = {0, ..., M_j - 1}`, `eps_j = 2 pi alpha_j sqrt(M_j) / K_j`.
/// Levels with `eps_j >= 1` are rejected with the smallest workable `K`.
pub fn build_tower_th01(specs: &[LevelSpec]) -> Result<Tower, TowerError> {
    let mut levels = Vec::with_capacity(specs.len());
    let mut eps_sum = 0.0;
    for (index, spec) in specs.iter().enumerate() {
        let (n, b, l) = spec_digits(spec).map_err(|e| match e {
            TowerError::BadSpec { reason, .. } => TowerError::BadSpec { index, reason },
            other => other,
        })?;
        let eps =
            std::f64::consts::TAU * spec.alpha as f64 * (spec.m as f64).sqrt() / spec.k as f64;
        if eps >= 1.0 {
            return Err(TowerError::EpsilonTooLarge {
                index,
                eps,
                suggested_k: (std::f64::consts::TAU * spec.alpha as f64
                    * (spec.m as f64).sqrt())
                .ceil() as u64
                    + 1,
            });
        }
        if n < 2 {
            return Err(TowerError::BadSpec {
                index,
                reason: "N must be at least 2".into(),
            });
        }
        let report = verify_apf_level(n, &b, &l)?;
        debug_assert!(
            report.eps_measured <= eps + 1e-12,
            "level {index}: measured {} above guaranteed {eps}",
            report.eps_measured
        );
        eps_sum += eps;
        levels.push(TowerLevel {
            n,
            b,
            l,
            eps,
            eps_measured: report.eps_measured,
            bounds: report.bounds,
        });
    }
    Ok(Tower { levels, eps_sum })
}

impl Tower {
    /// Tower from a self-similar pair `(N, B)` repeated `depth` times.
    pub fn self_similar(n: u64, b: &[u64], depth: usize) -> Result<Self, TowerError> {
        let mut levels = Vec::with_capacity(depth);
        for _ in 0..depth {
            let l: Vec<u64> = (0..b.len() as u64).collect();
            let report = verify_apf_level(n, b, &l)?;
            levels.push(TowerLevel {
                n,
                b: b.to_vec(),
                l,
                eps: report.eps_measured,
                eps_measured: report.eps_measured,
                bounds: report.bounds,
            });
        }
        Ok(Tower {
            eps_sum: levels.iter().map(|l| l.eps).sum(),
            levels,
        })
    }

    /// The transform of the tower measure at `xi`: the finite product
    /// `prod_j m_{B_j}(xi / (N_1 ... N_j))` over built levels. The tail is
    /// treated as 1; the returned level count is the truncation note.
    pub fn mu_hat(&self, xi: f64) -> (Complex64, usize) {
        let mut value = Complex64::new(1.0, 0.0);
        let mut denom = 1.0;
        for level in &self.levels {
            denom *= level.n as f64;
            let x = xi / denom;
            let mut acc = Complex64::default();
            for &b in &level.b {
                acc += Complex64::from_polar(1.0, std::f64::consts::TAU * (b as f64 * x));
            }
            value *= acc / level.b.len() as f64;
        }
        (value, self.levels.len())
    }

    /// The level-n frame spectrum `L_1 + N_1 L_2 + ... + (N_1...N_{n-1}) L_n`
    /// with the sandwich constants `(prod (1-eps_j)^2, prod (1+eps_j)^2)`.
    pub fn frame_spectrum(&self, n: usize) -> Result<(Vec<i64>, (f64, f64)), TowerError> {
        if n < 1 || n > self.levels.len() {
            return Err(TowerError::LevelOutOfRange {
                built: self.levels.len(),
                requested: n,
            });
        }
        let mut freqs: Vec<i64> = vec![0];
        let mut scale: i64 = 1;
        let mut lower = 1.0;
        let mut upper = 1.0;
        for level in &self.levels[..n] {
            let mut next = Vec::with_capacity(freqs.len() * level.l.len());
            for &f in &freqs {
                for &l in &level.l {
                    let term = scale
                        .checked_mul(l as i64)
                        .and_then(|t| t.checked_add(f))
                        .ok_or(TowerError::Overflow)?;
                    next.push(term);
                }
            }
            next.sort_unstable();
            next.dedup();
            freqs = next;
            scale = scale
                .checked_mul(level.n as i64)
                .ok_or(TowerError::Overflow)?;
            lower *= (1.0 - level.eps) * (1.0 - level.eps);
            upper *= (1.0 + level.eps) * (1.0 + level.eps);
        }
        Ok((freqs, (lower, upper)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_hadamard_level_has_zero_eps() {
        let tower = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 100,
            alpha: 0,
        }])
        .unwrap();
        assert_eq!(tower.levels[0].n, 200);
        assert_eq!(tower.levels[0].eps, 0.0);
        assert!(tower.levels[0].eps_measured < 1e-12);
    }

    #[test]
    fn near_hadamard_level_201() {
        let tower = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 100,
            alpha: 1,
        }])
        .unwrap();
        let level = &tower.levels[0];
        assert_eq!(level.n, 201);
        assert_eq!(level.b, vec![0, 100]);
        assert_eq!(level.l, vec![0, 1]);
        let expected_eps = std::f64::consts::TAU * 2.0_f64.sqrt() / 100.0;
        assert!((level.eps - expected_eps).abs() < 1e-15);
        assert!(level.eps_measured <= level.eps);
    }

    #[test]
    fn too_small_k_is_rejected() {
        let err = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 5,
            alpha: 1,
        }])
        .unwrap_err();
        match err {
            TowerError::EpsilonTooLarge { eps, suggested_k, .. } => {
                assert!((eps - std::f64::consts::TAU * 2.0_f64.sqrt() / 5.0).abs() < 1e-12);
                assert!(suggested_k > 5);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn perturbation_norm_within_bound() {
        for spec in [
            LevelSpec { m: 2, k: 100, alpha: 1 },
            LevelSpec { m: 3, k: 50, alpha: 2 },
            LevelSpec { m: 4, k: 200, alpha: 3 },
        ] {
            let (measured, bound) = level_perturbation_norm(&spec).unwrap();
            assert!(
                measured <= bound,
                "{spec:?}: measured {measured} > bound {bound}"
            );
        }
    }

    #[test]
    fn tower_mu_hat_at_zero_is_one() {
        let tower = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 100,
            alpha: 1,
        }; 3])
        .unwrap();
        let (v, levels) = tower.mu_hat(0.0);
        assert_eq!(levels, 3);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn self_similar_tower_matches_ifs_transform() {
        use crate::latmath::{DigitSet, IntMatrix};
        let tower = Tower::self_similar(4, &[0, 2], 25).unwrap();
        let r = IntMatrix::from_rows(&[vec![4]]).unwrap();
        let b = DigitSet::from_scalars(&[0, 2]).unwrap();
        let ev = crate::fourier::MuHatEvaluator::new(&r, &b).unwrap();
        let mut rng = crate::rng::Lcg::new(11);
        for _ in 0..20 {
            let xi = rng.next_in(-8.0, 8.0);
            let (tower_value, _) = tower.mu_hat(xi);
            let ifs_value = ev.eval(&[xi], 1e-11).unwrap();
            assert!(
                (tower_value - ifs_value.value).norm() < 1e-9,
                "at {xi}: {tower_value} vs {}",
                ifs_value.value
            );
        }
    }

    #[test]
    fn frame_spectrum_constants() {
        let tower = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 100,
            alpha: 1,
        }; 3])
        .unwrap();
        let (freqs, (lower, upper)) = tower.frame_spectrum(3).unwrap();
        let eps = std::f64::consts::TAU * 2.0_f64.sqrt() / 100.0;
        assert!((lower - (1.0 - eps).powi(6)).abs() < 1e-12);
        assert!((upper - (1.0 + eps).powi(6)).abs() < 1e-12);
        // L_1 + N L_2 + N^2 L_3 with L = {0,1}, N = 201
        assert_eq!(freqs.len(), 8);
        assert!(freqs.contains(&(1 + 201 + 201 * 201)));
        // level 1 is L_1 itself
        let (f1, _) = tower.frame_spectrum(1).unwrap();
        assert_eq!(f1, vec![0, 1]);
    }

    #[test]
    fn all_zero_eps_tower_constants_are_one() {
        let tower = build_tower_th01(&[LevelSpec {
            m: 2,
            k: 10,
            alpha: 0,
        }; 4])
        .unwrap();
        let (_, (lower, upper)) = tower.frame_spectrum(4).unwrap();
        assert_eq!(lower, 1.0);
        assert_eq!(upper, 1.0);
    }
}
