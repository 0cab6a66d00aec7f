//! Seeded linear-congruential stream used wherever reproducible pseudo-random
//! choices are needed (random-swap selection, sampled verifications, test
//! point generation).
//!
//! The generator is pinned for cross-implementation reproducibility:
//! `x_{k+1} = 6364136223846793005 * x_k + 1442695040888963407 (mod 2^64)`,
//! seeded with `seed ^ 0x9e3779b97f4a7c15`, and draws take the high 32 bits.

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        let mut rng = Self {
            state: seed ^ 0x9e3779b97f4a7c15,
        };
        rng.next_u64(); // decorrelate small seeds
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform draw from `0..bound` via the high 32 bits.
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0 && bound <= u32::MAX as usize);
        ((self.next_u64() >> 32) % bound as u64) as usize
    }

    /// Uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
