//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a base seed
//! and a stream label, so independent consumers (users, nodes, particles,
//! Monte Carlo trials) never share a sequence and results do not depend on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels used by the generators.
pub mod stream {
    pub const USERS: u64 = 0x5553_4552;
    pub const NODES: u64 = 0x4e4f_4445;
    pub const RANDOM_DEPLOY: u64 = 0x5241_4e44;
    pub const PSO: u64 = 0x5053_4f00;
    pub const FIXED: u64 = 0x4649_5844;
    pub const SEPARATION: u64 = 0x5345_5041;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, stream: u64) -> u64 {
    mix64(mix64(base) ^ stream)
}

pub fn rng_for(base: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}
