//! Deterministic random streams.
//!
//! A run's generator is derived from a master seed and a list of integer
//! keys by chaining SplitMix64 finalizers. The derivation depends only on the
//! key values, never on the order in which streams are requested, so a
//! benchmark matrix gives the same rows however its cells are scheduled.
//!
//! Keys used by the harness: `[name_key(instance), name_key(algorithm), run]`.
//! Inside a run, PRIHGA derives one stream per `[generation, slot]` and MULTLS
//! one per restart index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SolverRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream identified by `keys` under `master`.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn stream(master: u64, keys: &[u64]) -> SolverRng {
    SolverRng::seed_from_u64(derive_seed(master, keys))
}

/// Stable 64-bit key of a name (FNV-1a over the lowercase bytes).
pub fn name_key(name: &str) -> u64 {
    name.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ b.to_ascii_lowercase() as u64).wrapping_mul(0x0100_0000_01B3)
    })
}
