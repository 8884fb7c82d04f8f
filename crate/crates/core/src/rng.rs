//! Reproducible randomness.
//!
//! Every stream is xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Derived quantities are defined
//! here so that other implementations can reproduce the exact draws:
//!
//! * uniform `[0, 1)`: `(next_u64 >> 11) · 2⁻⁵³`
//! * bounded integer: rejection on `next_u64` below the largest multiple of
//!   the bound, then `% bound`
//! * standard normal: Box–Muller on `u1 = 1 − uniform`, `u2 = uniform`;
//!   the cosine branch is returned first, the sine branch is cached for the
//!   next call
//! * stream/cell seed derivation: [`mix_seed`], the SplitMix64 finaliser
//!   folded over the inputs

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function (Stafford variant 13).
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`: `h ← splitmix64(h ^ splitmix64(part))`.
pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |h, &p| splitmix64(h ^ splitmix64(p)))
}

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
    spare_normal: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: Xoshiro256StarStar::seed_from_u64(seed), spare_normal: None }
    }

    /// Independent stream `stream` of `seed`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        Self::new(mix_seed(seed, &[stream]))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % bound;
            }
        }
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// `+1.0` or `-1.0` with equal probability.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.uniform() < 0.5 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * theta.sin());
        radius * theta.cos()
    }
}
