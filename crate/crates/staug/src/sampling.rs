//! Seeded random sources for the two stochastic ingredients of the pipeline:
//! uniform recombination weights and the Beta mix-up coefficient.
//!
//! The generator is ChaCha12 seeded through SplitMix64, so a given seed yields
//! the same draw sequence on every platform. Child sources are derived by seed
//! mixing so parallel consumers stay order-independent.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic random source; same seed, same sequence, everywhere.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child source for task `index`; derivation does not consume
    /// any state from `self`, so children can be handed out in any order.
    pub fn child(&self, index: u64) -> RandomSource {
        RandomSource::new(splitmix64(self.seed ^ splitmix64(index.wrapping_add(1))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in [0, 1) with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [low, high).
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// Uniform index in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Rejection-free scaling is fine here: n is tiny next to 2^53.
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Standard normal via Box-Muller (no spare caching, one draw per call).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shapes below 1 are boosted by a
    /// power of a uniform.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        debug_assert!(shape > 0.0);
        if shape < 1.0 {
            let g = self.gamma(shape + 1.0);
            let u = 1.0 - self.next_f64();
            return g * u.powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let mut x;
            let mut v;
            loop {
                x = self.next_normal();
                v = 1.0 + c * x;
                if v > 0.0 {
                    break;
                }
            }
            v = v * v * v;
            let u = self.next_f64();
            if u < 1.0 - 0.0331 * x * x * x * x {
                return d * v;
            }
            if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Recombination weights for one channel: one weight per IMF plus the residue weight.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub residue_weight: f64,
}

/// n independent draws from U(a, b); residue weight fixed to 1.
pub fn draw_weights(n: usize, a: f64, b: f64, rng: &mut RandomSource) -> Result<WeightVector> {
    if a >= b {
        return Err(Error::Config(format!(
            "weight bounds must satisfy a < b, got a={a}, b={b}"
        )));
    }
    Ok(WeightVector {
        weights: (0..n).map(|_| rng.uniform(a, b)).collect(),
        residue_weight: 1.0,
    })
}

/// One draw from Beta(alpha, alpha), as a ratio of two Gamma draws.
pub fn draw_lambda(alpha: f64, rng: &mut RandomSource) -> Result<f64> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
    }
    let x = rng.gamma(alpha);
    let y = rng.gamma(alpha);
    if x + y == 0.0 {
        // Underflow corner for very small alpha; either endpoint is a fair pick.
        return Ok(if rng.next_f64() < 0.5 { 0.0 } else { 1.0 });
    }
    Ok(x / (x + y))
}
