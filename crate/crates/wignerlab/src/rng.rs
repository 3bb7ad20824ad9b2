//! Seed derivation for reproducible parallel replica generation.
//!
//! Every replica draws from its own ChaCha stream keyed by a stable 64-bit
//! mix of (master seed, dimension, replica index), so results do not depend
//! on worker count or scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer step; a standard stateless 64-bit mixer.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable derived seed for one replica: hash(master seed, n, replica index).
pub fn derive_seed(master_seed: u64, n: usize, replica: u64) -> u64 {
    let mut acc = mix64(master_seed);
    acc = mix64(acc ^ (n as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
    mix64(acc ^ replica.wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Counter-based generator for one derived seed.
pub fn replica_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
