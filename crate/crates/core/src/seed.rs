//! Seed stream splitting.
//!
//! A run seed `s` expands to the stream `splitmix64(s + i * GOLDEN)` for
//! `i = 0, 1, 2, ...`; trial `i` of any sweep seeds a `ChaCha8Rng` with the
//! `i`-th value. Results therefore do not depend on worker count or order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    root: u64,
}

impl SeedStream {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn derive(&self, index: u64) -> u64 {
        splitmix64(self.root.wrapping_add(index.wrapping_mul(GOLDEN)))
    }

    /// Child stream for a nested sweep.
    pub fn substream(&self, index: u64) -> Self {
        Self { root: self.derive(index) ^ 0x5DEE_CE66_D1CE_4E5B }
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(index))
    }
}
