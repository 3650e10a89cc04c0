//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha` 0.9) keyed by a 64-bit
//! seed. Named substreams are derived without touching the parent: the label
//! is hashed with FNV-1a, mixed with the parent key through SplitMix64, and
//! the result seeds a fresh ChaCha8 instance. ChaCha8 output is fixed by the
//! algorithm, so a seed reproduces the same draw sequence on every platform.
//!
//! Simulations use one substream per concern: `env` for reward sampling,
//! `agent/<seat>/tie` for argmax tie-breaking and `agent/<seat>/sample` for
//! partner predictions and posterior draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

/// Version tag of the generator construction. Bump when anything above changes.
pub const GENERATOR_VERSION: &str = "chacha8-splitmix-fnv1a/1";

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The key this stream was seeded with.
    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream identified by `label`. Does not advance `self`.
    pub fn substream(&self, label: &str) -> Self {
        Self::new(mix64(self.key ^ mix64(fnv1a64(label.as_bytes()))))
    }

    /// Child stream for the `index`-th member of a family (`agent/3/tie`, runs, ...).
    pub fn substream_indexed(&self, label: &str, index: u64) -> Self {
        self.substream(label).substream(&index.to_string())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`. `n == 1` returns 0 without consuming a draw.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        if n == 1 {
            return 0;
        }
        self.rng.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal draw (ziggurat, `rand_distr::StandardNormal`).
    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Beta(alpha, beta) draw. Panics on non-positive shape parameters.
    pub fn beta(&mut self, alpha: f64, beta: f64) -> f64 {
        Beta::new(alpha, beta)
            .expect("beta shape parameters must be positive")
            .sample(&mut self.rng)
    }
}

/// Seed for run `index` of a batch started from `base`: `mix64(mix64(base) + index)`.
/// Mixing the base first keeps batches with adjacent base seeds disjoint.
pub fn run_seed(base: u64, index: u64) -> u64 {
    mix64(mix64(base).wrapping_add(index))
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
