//! Seed plumbing shared across the crate.
//!
//! All randomness flows from one user-facing seed. Sub-streams are derived
//! by hashing `(seed, purpose)` with FNV-1a, which is stable across Rust
//! releases and platforms (the std `DefaultHasher` is not).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// Stable FNV-1a hash of a byte string.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive the sub-seed for a named purpose from the run seed.
pub fn sub_seed(seed: u64, purpose: &str) -> u64 {
    let mut h = fnv1a(purpose.as_bytes());
    for b in seed.to_le_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Seeded RNG for a named purpose. ChaCha8 keeps streams identical across
/// platforms and `rand` point releases.
pub fn rng_for(seed: u64, purpose: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, purpose))
}
