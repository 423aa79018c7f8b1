//! Seeded RNG streams and deterministic seed derivation.
//!
//! Every stochastic component takes a `u64` seed and derives child seeds
//! for its parts, so a whole experiment is reproducible from one number
//! and independent parts never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used throughout; fast, portable, identical streams on every platform.
pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Derive a child seed from a base seed and a salt (run index, swarm index,
/// fold number, ...). SplitMix64 finalizer; distinct salts give uncorrelated
/// streams.
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
