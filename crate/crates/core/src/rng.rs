//! Seeded sampling used by every randomized routine.
//!
//! The generator is ChaCha8 (`rand_chacha` 0.3) seeded through
//! `SeedableRng::seed_from_u64`, which expands the 64-bit seed with the
//! PCG32 stream documented in `rand_core` 0.6. Bounded integers are drawn by
//! rejection: `x = next_u64()` is redrawn while `x >= zone`, where
//! `zone = 2^64 - (2^64 mod bound)`, and `x mod bound` is returned.
//! A uniform `k`-subset of `{0, …, n-1}` is the prefix of a partial
//! Fisher-Yates shuffle: for `i` in `0..k`, swap position `i` with
//! `i + uniform_below(n - i)`; the prefix is then sorted.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th sub-stream (trial, instance) of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

pub fn uniform_below(rng: &mut Rng, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

/// Uniform value in `[0, 1)` with 53 random bits.
pub fn uniform_unit(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sorted uniform `k`-subset of `0..n`.
pub fn random_subset(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + uniform_below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}
