//! Seeding and stream splitting.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`). A run
//! has one master seed; each (experiment label, replicate) pair selects its
//! own ChaCha stream so replicates never share randomness and results do not
//! depend on scheduling order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Recorded verbatim in run manifests.
pub const PRNG_DESCRIPTION: &str =
    "ChaCha8Rng (rand_chacha 0.9); seed_from_u64(master), stream = fnv1a64(label) + replicate * 0x9E3779B97F4A7C15";

pub type SourceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SourceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 64-bit FNV-1a; stable across platforms and releases.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn stream_rng(master: u64, label: &str, replicate: u64) -> SourceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(
        fnv1a64(label.as_bytes()).wrapping_add(replicate.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    );
    rng
}

/// Derives a generator seed for one (label, replicate) cell of an experiment.
pub fn derive_seed(master: u64, label: &str, replicate: u64) -> u64 {
    stream_rng(master, label, replicate).next_u64()
}
