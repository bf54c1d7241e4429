//! Named random streams derived from a single experiment seed.
//!
//! Every consumer asks for its own stream by label, so adding a consumer or
//! reordering parallel work never perturbs the numbers another module sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A child stream; labels compose (`a.child("x").child("y")`).
    pub fn child(&self, label: &str) -> SeedStream {
        SeedStream {
            seed: mix64(self.seed ^ fnv1a(label)),
        }
    }

    /// The `index`-th substream, used for independent Monte-Carlo trials.
    pub fn indexed(&self, index: u64) -> SeedStream {
        SeedStream {
            seed: mix64(self.seed.wrapping_add(mix64(index))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}
