//! Per-replication random streams.
//!
//! Stream recipe (version [`STREAM_VERSION`]):
//!
//! 1. `seed = mix64(mix64(master_seed) ^ replication)` where `mix64` is the
//!    SplitMix64 output finalizer.
//! 2. The 32-byte ChaCha8 key is the little-endian concatenation of the
//!    first four SplitMix64 outputs from state `seed`.
//! 3. Uniforms are `(next_u64 >> 11) * 2^-53` in `[0, 1)`; a Bernoulli(`q`)
//!    draw is `uniform < q`.
//!
//! Each replication's stream depends only on `(master_seed, replication)`,
//! so results do not depend on scheduling. Any change to this recipe must
//! bump [`STREAM_VERSION`].

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const STREAM_VERSION: u32 = 1;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the substream for one replication.
pub fn substream_seed(master_seed: u64, replication: u64) -> u64 {
    mix64(mix64(master_seed) ^ replication)
}

/// The random stream of a single replication. Not shareable.
#[derive(Debug)]
pub struct ReplicationStream {
    rng: ChaCha8Rng,
}

impl ReplicationStream {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        Self::from_seed(substream_seed(master_seed, replication))
    }

    pub fn from_seed(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        ReplicationStream {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `q`; exact at `q = 0` and `q = 1`.
    pub fn bernoulli(&mut self, q: f64) -> bool {
        self.uniform() < q
    }
}
