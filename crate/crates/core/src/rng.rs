//! Project-wide random number generation.
//!
//! Every stochastic operation in this crate is seeded with an explicit
//! `u64` and driven by ChaCha8, chosen because it is fast, statistically
//! solid for simulation, and supports 2^64 independent streams. Streams
//! are what make seeds splittable: a parent seed plus a stream index
//! yields an independent child generator without any shared state, so
//! work items can run in parallel and still reproduce bit-identically.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The single generator algorithm used across the crate.
pub type Rng = ChaCha8Rng;

/// Root generator for a seed (stream 0).
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child generator for work item `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic child seed for APIs that take a `u64` seed themselves.
///
/// Defined as the first output of the `(seed, stream)` generator, so the
/// derivation uses the same fixed algorithm as everything else.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    rng_stream(seed, stream).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_deterministic() {
        let a1 = rng_stream(7, 1).next_u64();
        let a2 = rng_stream(7, 2).next_u64();
        assert_ne!(a1, a2);
        assert_eq!(a1, rng_stream(7, 1).next_u64());
    }

    #[test]
    fn derive_seed_is_stable() {
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
        assert_ne!(derive_seed(42, 3), derive_seed(42, 4));
        assert_ne!(derive_seed(42, 3), derive_seed(43, 3));
    }
}
