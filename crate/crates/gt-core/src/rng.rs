//! A tiny fixed-algorithm generator for seeded, reproducible modes.
//!
//! Keeping the algorithm in-crate means synthesized corpora and random
//! perturbations never change under dependency upgrades: the same seed
//! yields the same bytes forever.

/// SplitMix64 stream.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Uniform value in the inclusive range.
    pub fn in_range(&mut self, low: i64, high: i64) -> i64 {
        let span = (high - low + 1) as u64;
        low + self.below(span) as i64
    }
}
