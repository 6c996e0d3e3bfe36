//! Seeded random streams.
//!
//! Every stochastic routine in the crate takes its stream as an explicit
//! argument. [`stream`] builds the canonical generator from a seed and
//! [`derive_seed`] produces independent sub-seeds for parallel work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for `(master, cell, replication)`; the result does
/// not depend on the order in which cells or replications are visited.
pub fn derive_seed(master: u64, cell: u64, replication: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell) ^ replication)
}
