//! Deterministic random number stream.
//!
//! All randomness in the library flows through [`RngStream`], which wraps the
//! ChaCha12 stream cipher seeded from a 64-bit integer. ChaCha produces the
//! same byte stream on every platform, and the uniform and normal conversions
//! below use only IEEE-754 double arithmetic and `libm`, so a seed fixes the
//! deviate sequence bit for bit everywhere.
//!
//! Normal deviates come from the Box-Muller transform; the second deviate of
//! each pair is cached so consecutive calls consume the generator evenly.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// SplitMix64 mixing step, used to derive well-separated child seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded stream of uniform and standard-normal deviates.
///
/// Same seed, same platform-independent sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    chacha: ChaCha12Rng,
    cached_normal: Option<f64>,
}

impl RngStream {
    /// Creates a stream from a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        RngStream {
            chacha: ChaCha12Rng::seed_from_u64(seed),
            cached_normal: None,
        }
    }

    /// Derives an independent child stream from a master seed and an index.
    ///
    /// Used to give concurrent trials their own streams: the result depends
    /// only on `(master_seed, index)`, never on call order.
    pub fn derive(master_seed: u64, index: u64) -> Self {
        let mixed = splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(1)));
        RngStream::new(mixed)
    }

    /// Next raw 64-bit word from the cipher stream.
    pub fn next_u64(&mut self) -> u64 {
        self.chacha.next_u64()
    }

    /// Uniform deviate in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform integer in `[0, bound)` by rejection sampling (no modulo bias).
    ///
    /// # Panics
    /// Panics if `bound` is zero.
    pub fn uniform_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "uniform_index bound must be positive");
        let bound = bound as u64;
        // Smallest power-of-two mask covering bound, then reject overshoot.
        let mask = u64::MAX >> (bound - 1).leading_zeros().min(63);
        loop {
            let candidate = self.next_u64() & mask;
            if candidate < bound {
                return candidate as usize;
            }
        }
    }

    /// Standard-normal deviate via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(second) = self.cached_normal.take() {
            return second;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.cached_normal = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    /// Fills a buffer with standard-normal deviates.
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for slot in out.iter_mut() {
            *slot = self.normal();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64(), "seeded streams must agree");
        }
    }

    #[test]
    fn same_seed_same_normals() {
        let mut a = RngStream::new(7);
        let mut b = RngStream::new(7);
        for _ in 0..100 {
            assert_eq!(
                a.normal().to_bits(),
                b.normal().to_bits(),
                "normal deviates must be bit-identical for equal seeds"
            );
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = RngStream::new(1);
        let mut b = RngStream::new(2);
        let same = (0..10).all(|_| a.next_u64() == b.next_u64());
        assert!(!same, "distinct seeds should give distinct streams");
    }

    #[test]
    fn derived_streams_are_separated() {
        let mut a = RngStream::derive(99, 0);
        let mut b = RngStream::derive(99, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_range_and_moments() {
        let mut rng = RngStream::new(2024);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u), "uniform deviate out of [0,1): {u}");
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "uniform mean off: {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut rng = RngStream::new(5);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let g = rng.normal();
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "normal mean off: {mean}");
        assert!((var - 1.0).abs() < 0.02, "normal variance off: {var}");
    }

    #[test]
    fn uniform_index_covers_range_without_bias() {
        let mut rng = RngStream::new(17);
        let mut counts = vec![0usize; 5];
        for _ in 0..50_000 {
            counts[rng.uniform_index(5)] += 1;
        }
        for (value, &count) in counts.iter().enumerate() {
            assert!(
                (count as f64 - 10_000.0).abs() < 600.0,
                "index {value} drawn {count} times, expected near 10000"
            );
        }
    }
}
