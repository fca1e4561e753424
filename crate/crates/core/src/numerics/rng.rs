//! Seeded, splittable random streams.
//!
//! Built on ChaCha12, a counter-based generator: identical `(seed, stream_id)`
//! reproduces an identical sequence bit-exactly on every platform, and
//! sub-streams are independent regardless of scheduling order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream { seed, stream_id, rng }
    }

    /// Independent sub-stream for trajectory `k`; do not share one stream
    /// across concurrent tasks, split instead.
    pub fn split(&self, k: u64) -> Self {
        RandomStream::new(self.seed, self.stream_id.wrapping_add(1).wrapping_add(k))
    }

    /// Uniform variate in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}
