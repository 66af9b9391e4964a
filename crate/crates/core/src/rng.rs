//! Seeded random number generation.
//!
//! All randomness flows through [`Rng`], a ChaCha8 stream cipher generator
//! from `rand_chacha` (period far beyond 2^64). Child seeds come from a
//! SplitMix64-style mixing of `(master, index)`.

use rand::SeedableRng;

/// The generator used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of task `index` from a master seed.
///
/// The mapping is fixed: batch results are reproducible across platforms and
/// thread counts.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
