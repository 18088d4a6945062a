// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Counter-based deterministic Gaussian noise streams.
//!
//! Trajectory integration needs Wiener increments that are reproducible
//! *independently of execution order*: trajectory k's step n must see the
//! same dW no matter how many threads run or which trajectory finishes
//! first.  Stateful generators cannot give that cheaply; a counter-based
//! generator — output = hash(key, counter) — makes every draw a pure
//! function of (seed, step index), in the spirit of Salmon et al.,
//! "Parallel random numbers: as easy as 1, 2, 3" (SC'11).
//!
//! The hash is the splitmix64 finalizer over a Weyl sequence (golden-ratio
//! increment), a BigCrush-passing construction.  Gaussians come from the
//! Box–Muller pair transform; uniforms are strictly inside (0, 1], so the
//! logarithm never sees zero.

/// Golden-ratio Weyl increment, 2⁶⁴/φ rounded to odd.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer: a bijective avalanche mix of 64 bits.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// A stateless, counter-addressable random stream.
///
/// All methods are pure functions of `(seed, counter)`; cloning or sharing
/// the generator cannot change any draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    /// Creates the stream for a given 64-bit seed.
    pub fn new(seed: u64) -> Self {
        Self { key: mix64(seed) }
    }

    /// Raw 64 uniformly mixed bits at a counter.
    #[inline]
    pub fn raw(&self, counter: u64) -> u64 {
        mix64(self.key.wrapping_add(GOLDEN.wrapping_mul(counter)))
    }

    /// Uniform f64 strictly inside (0, 1] at a counter.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        // 53 mantissa bits; +1 keeps the value strictly positive.
        ((self.raw(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A standard-normal pair via Box–Muller, consuming counters
    /// (2·counter, 2·counter + 1).
    #[inline]
    pub fn normal_pair(&self, counter: u64) -> (f64, f64) {
        let u1 = self.uniform(2 * counter);
        let u2 = self.uniform(2 * counter + 1);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// A single standard normal at a counter (first of the pair).
    #[inline]
    pub fn standard_normal(&self, counter: u64) -> f64 {
        self.normal_pair(counter).0
    }
}

/// The documented per-trajectory seed mixing: trajectory `index` of an
/// ensemble with `base_seed` uses `mix64(base_seed + (index+1)·GOLDEN)`.
///
/// Depends only on (base_seed, index), so growing an ensemble appends new
/// members without recomputing existing ones.
pub fn derive_trajectory_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}
