//! Seed derivation for deterministic, independently salted random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64-style mixing of a base seed with a salt, so distinct purposes
/// (topology vs weights, per-node streams, retry attempts) get decorrelated
/// streams from one user-facing seed.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix_seed3(seed: u64, a: u64, b: u64) -> u64 {
    mix_seed(mix_seed(seed, a), b)
}

pub(crate) fn stream(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, salt))
}
