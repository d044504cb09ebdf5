//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the master seed (expanded
//! with `SeedableRng::seed_from_u64`) and positioned on the ChaCha stream
//! selected by `stream_index`. Streams with the same key but different
//! indices are disjoint keystreams, so replications can be scheduled on any
//! worker without changing their variates.
//!
//! The generator and the mapping from 64-bit words to uniforms are frozen:
//! changing either invalidates every seeded regression baseline.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// A seedable pseudo-random stream identified by `(master_seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A sibling stream under the same master seed.
    pub fn substream(&self, stream_index: u64) -> Self {
        Self::new(self.master_seed, stream_index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1): the top 53 bits, offset by half a step.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    /// Standard normal by the Box-Muller transform (one value per call).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
