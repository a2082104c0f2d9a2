//! Reproducible random number substreams.
//!
//! A [`RngStream`] is a key. Each `(index, round)` pair addresses its own
//! ChaCha8 substream: the element index selects the 64-bit ChaCha stream and
//! the round selects a disjoint window of the block counter. Because a
//! substream is a pure function of `(seed, index, round)`, per-element loops
//! give the same answer however they are split across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved for each round within one ChaCha stream.
const ROUND_SHIFT: u32 = 36;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    base: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child key for an independent purpose (a time step, a grid cell, ...).
    pub fn derive(&self, tag: u64) -> Self {
        Self::new(mix64(self.seed ^ mix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    /// The generator for element `index` in round `round`.
    pub fn substream(&self, index: u64, round: u32) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(u128::from(round) << ROUND_SHIFT);
        rng
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
