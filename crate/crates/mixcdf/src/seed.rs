//! Deterministic derivation of per-task RNG streams from a single master seed.
//!
//! Every randomized routine in this crate owns an RNG seeded through
//! [`derive`], keyed by a label naming the task and an index naming the
//! replicate. Parallel and serial execution therefore consume identical
//! streams, and replicates can be recomputed in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; bijective on u64 with good avalanche behavior.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of the stream label.
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a child seed from `(master, label, index)`.
pub fn derive(master: u64, label: &str, index: u64) -> u64 {
    let h = splitmix64(master ^ hash_label(label));
    splitmix64(h ^ splitmix64(index))
}

/// RNG for the stream named by `(master, label, index)`.
pub fn rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, label, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_stable_and_label_sensitive() {
        let a = derive(7, "gibbs", 0);
        assert_eq!(a, derive(7, "gibbs", 0));
        assert_ne!(a, derive(7, "gibbs", 1));
        assert_ne!(a, derive(7, "null-data", 0));
        assert_ne!(a, derive(8, "gibbs", 0));
    }

    #[test]
    fn rng_streams_are_independent_of_consumption_order() {
        use rand::Rng;
        let mut r0 = rng(42, "x", 0);
        let mut r1 = rng(42, "x", 1);
        let a: f64 = r0.gen();
        let b: f64 = r1.gen();
        let mut r0_again = rng(42, "x", 0);
        let mut r1_again = rng(42, "x", 1);
        let b_again: f64 = r1_again.gen();
        let a_again: f64 = r0_again.gen();
        assert_eq!(a, a_again);
        assert_eq!(b, b_again);
    }
}
