//! Seed derivation for reproducible, scheduling-independent randomness.
//!
//! Every parallel unit of work (tree, bootstrap, intersection tree, permutation
//! repeat) gets its own RNG seeded from `(master, stream, index)`, so results
//! are identical no matter how work is scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags keeping the per-purpose seed spaces disjoint.
pub mod stream {
    pub const TREE: u64 = 1;
    pub const BOOTSTRAP_ROWS: u64 = 2;
    pub const BOOTSTRAP_FOREST: u64 = 3;
    pub const ITERATION: u64 = 4;
    pub const RIT_TREE: u64 = 5;
    pub const RIT_RUN: u64 = 6;
    pub const PERMUTATION: u64 = 7;
    pub const SPLIT: u64 = 8;
    pub const CV: u64 = 9;
    pub const FEATURES: u64 = 10;
    pub const LABELS: u64 = 11;
    pub const NOISE: u64 = 12;
    pub const MIXTURE: u64 = 13;
    pub const SCENARIO: u64 = 14;
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed, a stream tag, and an index.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let golden = 0x9e37_79b9_7f4a_7c15u64;
    let mut z = master ^ mix(stream.wrapping_add(1).wrapping_mul(golden));
    z = mix(z);
    z ^= mix(index.wrapping_add(1).wrapping_mul(golden));
    mix(z)
}

/// An RNG seeded for the given `(master, stream, index)` work unit.
pub fn rng_for(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

/// An RNG seeded directly from `seed`.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
