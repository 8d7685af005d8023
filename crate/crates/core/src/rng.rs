//! Seeded pseudorandomness.
//!
//! All stochastic behaviour in the crate (synthetic data, initial points,
//! epoch permutations) draws from [`SeededRng`], a thin wrapper over the
//! ChaCha20 stream cipher as implemented by `rand_chacha` (20 rounds, 64-bit
//! block counter, 64-bit stream id). A `u64` seed is expanded to the 256-bit
//! key with `rand_core`'s documented PCG32 expansion, so a given seed yields
//! the same stream on every platform.
//!
//! Derived quantities use only `next_u64`:
//! - bounded integers: Lemire's multiply-high method with rejection of the
//!   biased low-word range, so `below(s)` is exactly uniform on `0..s`;
//! - uniform reals: the top 53 bits scaled by `2^-53`;
//! - standard normals: Box–Muller, one output per pair of uniforms.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
    draws: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    /// Independent stream for the same seed, e.g. data vs. initial point.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            inner,
            draws: 0,
        }
    }

    /// Raw 256-bit key, mainly for checking published cipher test vectors.
    pub fn from_key(key: [u8; 32]) -> Self {
        Self {
            seed: 0,
            inner: ChaCha20Rng::from_seed(key),
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of `u64` words consumed so far.
    pub fn position(&self) -> u64 {
        self.draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u64) -> Result<u64> {
        if bound == 0 {
            return Err(Error::contract("bounded draw requires a positive bound"));
        }
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
                low = m as u64;
            }
        }
        Ok((m >> 64) as u64)
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping ln finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }

    /// Fisher–Yates shuffle of `0..n`, drawing swap partners from the top down.
    pub fn permutation(&mut self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Err(Error::contract("permutation length must be at least 1"));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i as u64 + 1)? as usize;
            perm.swap(i, j);
        }
        Ok(perm)
    }
}

/// Free-function form of [`SeededRng::permutation`].
pub fn fisher_yates_permutation(rng: &mut SeededRng, n: usize) -> Result<Vec<usize>> {
    rng.permutation(n)
}
