//! Counter-based seed derivation.
//!
//! Every random stream in the toolkit is identified by `(seed, stream, index)`
//! and turned into an independent `ChaCha8Rng`. Work split across threads
//! therefore produces the same numbers regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Derives child seeds and generators from one root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSplitter {
    pub seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSplitter {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Child seed for `(stream, index)`.
    pub fn derive(&self, stream: u64, index: u64) -> u64 {
        let a = splitmix64(self.seed);
        let b = splitmix64(a ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93));
        splitmix64(b ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
    }

    /// Generator for `(stream, index)`.
    pub fn rng(&self, stream: u64, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(stream, index))
    }

    /// Splitter rooted at a derived seed.
    pub fn child(&self, stream: u64, index: u64) -> SeedSplitter {
        SeedSplitter::new(self.derive(stream, index))
    }
}
