//! Per-trajectory random streams.
//!
//! Trajectory `i` of a run seeded with `s` always draws from ChaCha8 keyed by
//! `s` on stream `i`, so results do not depend on how trajectories are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(seed, trajectory index)` identifying one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        RngStream { seed, index }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }

    /// Same seed, another trajectory.
    pub fn with_index(&self, index: u64) -> Self {
        RngStream { seed: self.seed, index }
    }
}
