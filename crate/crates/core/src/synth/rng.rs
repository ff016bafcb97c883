//! SplitMix64, the generator behind every synthetic fixture.
//!
//! Output `i` (0-based) for seed `s` is `mix(s + (i + 1) * GAMMA)`, so any
//! language with wrapping 64-bit arithmetic reproduces the stream exactly.
//! Reference outputs live in `tests/data/splitmix64_vectors.json`.
//!
//! Derived values:
//! - `next_f64`: top 53 bits scaled by 2^-53, in `[0, 1)`.
//! - `below(n)`: `floor(next_f64() * n)`.
//! - `normal`: one Box-Muller output per two draws,
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`.
//! - `stream(seed, tag)`: independent sub-stream seeded with `mix(seed ^ mix(tag))`.

pub const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn stream(seed: u64, tag: u64) -> Self {
        Self::new(mix64(seed ^ mix64(tag)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
