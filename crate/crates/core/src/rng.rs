//! Portable random streams.
//!
//! All randomness comes from ChaCha8 seeded through `SeedableRng::seed_from_u64`;
//! chain `i` of a run seeded with `s` uses seed `s ^ i`. Floats and bounded
//! integers are derived here from raw `u64` draws so the streams do not depend
//! on any distribution code outside this module.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for chain `chain` of a run seeded with `seed`.
pub fn chain_rng(seed: u64, chain: u64) -> Rng {
    seeded(seed ^ chain)
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[lo, hi)`.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Uniform integer in `0..n` by rejection; `n` must be positive.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    assert!(n > 0, "empty range");
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// `+1.0` or `-1.0` with equal probability.
pub fn sign<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    if rng.next_u64() >> 63 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Exponential variate with the given rate, by inverse CDF.
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -libm::log(1.0 - unit(rng)) / rate
}

/// Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore + ?Sized>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// `k` distinct values from `0..n`, in draw order.
pub fn sample_without_replacement<R: RngCore + ?Sized>(rng: &mut R, n: usize, k: usize) -> alloc::vec::Vec<usize> {
    assert!(k <= n);
    let mut pool: alloc::vec::Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: alloc::vec::Vec<u64> = (0..4).map(|_| seeded(42).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(chain_rng(42, 0).next_u64(), chain_rng(42, 1).next_u64());
    }

    #[test]
    fn helpers_stay_in_range() {
        let mut rng = seeded(1);
        for _ in 0..10_000 {
            let u = unit(&mut rng);
            assert!((0.0..1.0).contains(&u));
            assert!(below(&mut rng, 7) < 7);
            assert!(exponential(&mut rng, 3.0) >= 0.0);
        }
        let picked = sample_without_replacement(&mut rng, 10, 10);
        let mut sorted = picked.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<alloc::vec::Vec<_>>());
    }
}
