//! Spectrum completion when the periodic zero set is empty: canonical
//! blocks are offset by integer shifts chosen so the transform stays
//! bounded below along the construction.
//!
//! Levels are built iteratively. Each block depth `n_k` is chosen so the
//! certified decay pushes every existing frequency below `eps0` under
//! `(R^T)^{-(n_k+p)}`; each block frequency `j` gets a shift `k(j)` with
//! `|muhat(x + y + k(j))|^2 >= delta0` sampled on a net of the `eps0`-ball
//! around `x = (R^T)^{-n_k} j` (net: center plus the 2^d cube corners at
//! `eps0/sqrt(d)`, a margin-delta0/2 reading of the compactness argument).
//! `k(0) = 0` always. A nonempty certified periodic zero set, or a `j`
//! with no admissible shift within `kmax`, aborts with a named failure.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{ToPrimitive, Zero};

use super::candidate::{Provenance, SpectrumCandidate};
use super::{rat_point_display, SpectrumError};
use crate::dynamics::{periodic_zero_scan, PointStatus};
use crate::fourier::MuHatEvaluator;
use crate::latmath::{IntVec, RatVec};
use crate::triple::{level_frequency_words, HadamardTriple};

#[derive(Clone, Debug)]
pub struct CompletionParams {
    pub eps0: f64,
    pub delta0: f64,
    /// Shift search bound `||k||_inf <= kmax`.
    pub kmax: i64,
    /// Number of levels to build.
    pub levels: usize,
    /// Cap on any level's frequency count.
    pub level_cap: usize,
    /// Built-in precondition scan: grid denominator over `[0,1)^d`.
    pub prescan_denominator: i64,
    pub prescan_kmax: i64,
}

impl Default for CompletionParams {
    fn default() -> Self {
        Self {
            eps0: 0.1,
            delta0: 1e-4,
            kmax: 5,
            levels: 3,
            level_cap: 1 << 18,
            prescan_denominator: 6,
            prescan_kmax: 3,
        }
    }
}

/// Per-level construction record.
#[derive(Clone, Debug)]
pub struct LevelMeta {
    pub n_k: usize,
    pub m_k: usize,
    pub block_size: usize,
    /// Shifts `(j, k(j))` with `k(j) != 0`.
    pub nonzero_shifts: Vec<(IntVec, IntVec)>,
}

#[derive(Debug)]
pub struct Completion {
    pub candidate: SpectrumCandidate,
    pub levels: Vec<LevelMeta>,
}

/// Integer shift vectors ordered by `(||k||_inf, value order)` with 0 first.
fn shifts_ordered(dim: usize, kmax: i64) -> Vec<Vec<i64>> {
    let mut values = vec![0i64];
    for a in 1..=kmax {
        values.push(a);
        values.push(-a);
    }
    let mut out = Vec::new();
    for shell in 0..=kmax {
        let shell_values: Vec<i64> = values
            .iter()
            .copied()
            .filter(|v| v.abs() <= shell)
            .collect();
        let mut idx = vec![0usize; dim];
        loop {
            let k: Vec<i64> = idx.iter().map(|&i| shell_values[i]).collect();
            if k.iter().map(|v| v.abs()).max().unwrap_or(0) == shell {
                out.push(k);
            }
            let mut pos = dim;
            let mut wrapped = true;
            while pos > 0 {
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < shell_values.len() {
                    wrapped = false;
                    break;
                }
                idx[pos] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    out
}

/// Builds an offset-modified candidate with positive completeness margin,
/// per the iterative construction. See the module docs for the scheme.
pub fn complete_spectrum(
    ev: &MuHatEvaluator,
    t: &HadamardTriple,
    params: &CompletionParams,
) -> Result<Completion, SpectrumError> {
    let dim = t.dim();
    // precondition: no certified periodic-zero point on the default grid
    let grid = crate::dynamics::fundamental_grid(dim, params.prescan_denominator);
    for entry in periodic_zero_scan(ev, &grid, params.prescan_kmax) {
        if let PointStatus::CertifiedInZ { certificates } = entry.status {
            return Err(SpectrumError::PeriodicZeroFound {
                point: rat_point_display(&entry.point),
                shifts: certificates.len(),
            });
        }
    }
    let rt = t.r().transpose();
    let decay = ev.decay();
    let net = sample_net(dim, params.eps0);
    let eval_tol = (params.delta0 * 1e-2).min(1e-9);
    let mut lambda: Vec<IntVec> = vec![vec![BigInt::zero(); dim]];
    let mut levels: Vec<Vec<IntVec>> = Vec::new();
    let mut exponents = Vec::new();
    let mut meta = Vec::new();
    let mut shifts_per_level = Vec::new();
    let mut m_k = 0usize;
    for level in 1..=params.levels {
        // block depth: certified decay brings every current frequency
        // below eps0 for all p >= 0
        let max_norm = lambda
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| {
                        let f = x.to_f64().unwrap();
                        f * f
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let mut n_k = 1;
        while decay.norm_bound(n_k) * max_norm.max(1e-300) >= params.eps0 {
            n_k += 1;
        }
        let block = level_frequency_words(t, n_k);
        if block.len().saturating_mul(lambda.len()) > params.level_cap {
            return Err(SpectrumError::SizeCap {
                cap: params.level_cap,
            });
        }
        let rt_nk = rt.pow(n_k);
        let rt_mk = rt.pow(m_k);
        let mut shifted_block: Vec<IntVec> = Vec::with_capacity(block.len());
        let mut nonzero_shifts = Vec::new();
        for j in &block {
            let as_rat: RatVec = j
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let x: Vec<f64> = ev
                .pullback(&as_rat, n_k)
                .iter()
                .map(|q| q.to_f64().unwrap())
                .collect();
            let is_zero_word = j.iter().all(|c| c.is_zero());
            let k = find_shift(ev, &x, &net, params, eval_tol, is_zero_word).ok_or_else(
                || SpectrumError::NoAdmissibleShift {
                    level,
                    j: rat_point_display(&as_rat),
                    kmax: params.kmax,
                },
            )?;
            let k_big: IntVec = k.iter().map(|&v| BigInt::from(v)).collect();
            let shifted: IntVec = j
                .iter()
                .zip(rt_nk.mat_vec(&k_big))
                .map(|(a, b)| a + b)
                .collect();
            if k.iter().any(|&v| v != 0) {
                nonzero_shifts.push((j.clone(), k_big));
            }
            shifted_block.push(shifted);
        }
        // Lambda_level = Lambda_{level-1} + (R^T)^{m_k} shifted_block
        let mut next: Vec<IntVec> = Vec::with_capacity(lambda.len() * shifted_block.len());
        for lam in &lambda {
            for j in &shifted_block {
                let moved = rt_mk.mat_vec(j);
                next.push(lam.iter().zip(&moved).map(|(a, b)| a + b).collect());
            }
        }
        next.sort();
        next.dedup();
        m_k += n_k;
        meta.push(LevelMeta {
            n_k,
            m_k,
            block_size: block.len(),
            nonzero_shifts: nonzero_shifts.clone(),
        });
        shifts_per_level.push(nonzero_shifts);
        levels.push(next.clone());
        exponents.push(m_k);
        lambda = next;
    }
    Ok(Completion {
        candidate: SpectrumCandidate::new(
            levels,
            exponents,
            Provenance::OffsetModified {
                shifts: shifts_per_level,
            },
        ),
        levels: meta,
    })
}

/// Net on the `eps0`-ball: the center plus the `2^d` cube corners at
/// `eps0 / sqrt(d)` (strictly inside the ball).
fn sample_net(dim: usize, eps0: f64) -> Vec<Vec<f64>> {
    let step = eps0 / (dim as f64).sqrt() * (1.0 - 1e-9);
    let mut net = vec![vec![0.0; dim]];
    for corner in 0..(1usize << dim) {
        net.push(
            (0..dim)
                .map(|i| if corner >> i & 1 == 1 { step } else { -step })
                .collect(),
        );
    }
    net
}

fn find_shift(
    ev: &MuHatEvaluator,
    x: &[f64],
    net: &[Vec<f64>],
    params: &CompletionParams,
    eval_tol: f64,
    force_zero: bool,
) -> Option<Vec<i64>> {
    let dim = x.len();
    let candidates = if force_zero {
        vec![vec![0i64; dim]]
    } else {
        shifts_ordered(dim, params.kmax)
    };
    'shifts: for k in candidates {
        for y in net {
            let point: Vec<f64> = x
                .iter()
                .zip(y)
                .zip(&k)
                .map(|((xi, yi), ki)| xi + yi + *ki as f64)
                .collect();
            let value = match ev.eval(&point, eval_tol) {
                Ok(v) => v,
                Err(_) => continue 'shifts,
            };
            if value.value.norm_sqr() < params.delta0 {
                continue 'shifts;
            }
        }
        return Some(k);
    }
    None
}
