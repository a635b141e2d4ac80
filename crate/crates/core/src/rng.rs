//! Counter-based seed splitting.
//!
//! Every randomized operation in this crate is a pure function of its inputs
//! and an explicit generator. Batch-level work (pairing) and per-pair work
//! (ratio draws, mask geometry) pull from separate ChaCha streams of the same
//! master seed, so results do not depend on iteration order or on how pairs
//! are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Splits one master seed into independent substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSplit {
    master: u64,
}

impl SeedSplit {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Stream used for batch-level draws (the pairing permutation).
    pub fn batch(&self) -> ChaCha8Rng {
        self.stream(0)
    }

    /// Stream owned by the pair with the given ordinal.
    pub fn pair(&self, ordinal: u64) -> ChaCha8Rng {
        self.stream(1 + ordinal)
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(id);
        rng
    }
}

/// Derives a child seed from a master seed and a tag (SplitMix64 finalizer).
///
/// Used for hierarchical seeding, e.g. one mixing seed per training step.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
