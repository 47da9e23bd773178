//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a [`Stream`] derived from a
//! master seed and a path of integer tags (case, grid point, replicate, row
//! ...). Streams with distinct paths are statistically independent, and the
//! derivation does not depend on which thread asks for them, so parallel
//! simulations are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Tags for the top-level purposes a stream is used for.
pub mod tag {
    pub const NULL_TABLE: u64 = 1;
    pub const MINP_BATCH: u64 = 2;
    pub const DATA: u64 = 3;
    pub const REPLICATE: u64 = 4;
    pub const DEMO_CURVE: u64 = 5;
    pub const DEMO_RAW: u64 = 6;
    pub const RETRY: u64 = 7;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a seed and a tag path into a single 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &t in path {
        h = splitmix64(h ^ splitmix64(t.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    h
}

/// Independent stream for `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
