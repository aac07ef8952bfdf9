//! Deterministic random rational points for Schwartz–Zippel cross-checks.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rational::Rational;

/// Seed used whenever a caller does not supply one; recorded in reports.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Numerators are drawn from `[-NUM_BOUND, NUM_BOUND]`.
pub const NUM_BOUND: i64 = 1_000_000;
/// Denominators are drawn from `[1, DEN_BOUND]`.
pub const DEN_BOUND: i64 = 1 << 16;

pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rational(&mut self) -> Rational {
        let p = self.rng.gen_range(-NUM_BOUND..=NUM_BOUND);
        let q = self.rng.gen_range(1..=DEN_BOUND);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    /// A rational in the open interval `(lo, hi)` with the same bounds on
    /// numerator and denominator granularity.
    pub fn rational_in(&mut self, lo: &Rational, hi: &Rational) -> Rational {
        let t = self.rng.gen_range(1..NUM_BOUND);
        let frac = Rational::new(BigInt::from(t), BigInt::from(NUM_BOUND));
        lo + (hi - lo) * frac
    }

    pub fn point(&mut self, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.rational()).collect()
    }

    /// Draws points until `accept` succeeds (used to reject poles).
    pub fn point_where<T>(&mut self, n: usize, tries: usize, mut accept: impl FnMut(&[Rational]) -> Option<T>) -> Option<(Vec<Rational>, T)> {
        for _ in 0..tries {
            let p = self.point(n);
            if let Some(v) = accept(&p) {
                return Some((p, v));
            }
        }
        None
    }

    pub fn gen_range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}
