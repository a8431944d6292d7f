//! Named sub-stream seed derivation.
//!
//! Every source of randomness in the harness draws from a `ChaCha8Rng`
//! seeded by the master seed combined with a stable name, so runs are
//! reproducible and the individual streams are independent of each other.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a, fixed here so seed derivation never depends on `std` hasher
/// internals.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives the seed of a named sub-stream from the master seed.
pub fn derive_seed(master: u64, name: &str) -> u64 {
    master ^ fnv1a(name.as_bytes())
}

/// Like [`derive_seed`] but additionally keyed by an index (episode
/// number, round number, ...).
pub fn derive_seed_indexed(master: u64, name: &str, index: u64) -> u64 {
    let mut bytes = Vec::with_capacity(name.len() + 8);
    bytes.extend_from_slice(name.as_bytes());
    bytes.extend_from_slice(&index.to_le_bytes());
    master ^ fnv1a(&bytes)
}

/// A `ChaCha8Rng` for the named sub-stream.
pub fn stream_rng(master: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, name))
}

/// A `ChaCha8Rng` for the named, indexed sub-stream.
pub fn stream_rng_indexed(master: u64, name: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed_indexed(master, name, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable() {
        // Frozen values: these must never change across builds, or saved
        // experiment configs would replay differently.
        assert_eq!(derive_seed(0, "stream-shuffle"), fnv1a(b"stream-shuffle"));
        assert_eq!(derive_seed(42, "epsilon"), 42 ^ fnv1a(b"epsilon"));
    }

    #[test]
    fn named_streams_differ() {
        assert_ne!(derive_seed(7, "replay"), derive_seed(7, "epsilon"));
        assert_ne!(
            derive_seed_indexed(7, "episode", 0),
            derive_seed_indexed(7, "episode", 1)
        );
    }
}
