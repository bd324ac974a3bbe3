//! Deterministic RNG stream derivation.
//!
//! Every random quantity in the crate flows from a single `u64` seed.
//! Independent streams — one per chain, per vertex, per replicate — are
//! derived by mixing the parent seed with a role tag through SplitMix64 and
//! feeding the result to ChaCha8. Derivation depends only on `(seed, tag)`,
//! never on thread scheduling, so results are bit-reproducible at any worker
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One SplitMix64 mixing round.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for the given role tag.
///
/// Tags are small integers with fixed meanings at each call site (vertex id,
/// replicate index, …). Mixing is non-linear so `child_seed(s, 0)` and
/// `child_seed(s, 1)` share no observable structure.
pub fn child_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Derives a child seed from two tags (e.g. replicate and vertex).
pub fn child_seed2(seed: u64, tag_a: u64, tag_b: u64) -> u64 {
    child_seed(child_seed(seed, tag_a), tag_b)
}

/// A ChaCha8 generator seeded deterministically from `seed`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
