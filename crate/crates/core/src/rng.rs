//! Deterministic seeding and Wiener increment generation.
//!
//! Trajectory seeds are derived from `(base_seed, index)` with the SplitMix64
//! finalizer so an ensemble is reproducible independent of scheduling,
//! worker count, or which subset of trajectories is rerun. The constants
//! below are part of the on-disk reproducibility contract and must not
//! change between versions.

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `x + gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trajectory seed: `splitmix64(splitmix64(base) ^ splitmix64(index))`.
pub fn trajectory_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base_seed) ^ splitmix64(index))
}

/// Stream of Wiener increments dW ~ N(0, dt) from a counter-based PRNG.
#[derive(Debug, Clone)]
pub struct WienerSource {
    rng: ChaCha12Rng,
    sqrt_dt: f64,
}

impl WienerSource {
    pub fn new(seed: u64, dt: f64) -> Self {
        WienerSource {
            rng: ChaCha12Rng::seed_from_u64(seed),
            sqrt_dt: dt.sqrt(),
        }
    }

    #[inline]
    pub fn next_dw(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.sqrt_dt * z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let s0 = trajectory_seed(42, 0);
        let s1 = trajectory_seed(42, 1);
        assert_ne!(s0, s1);
        assert_eq!(s0, trajectory_seed(42, 0));
        // regression pin on the documented mixing constants
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn wiener_moment_bounds() {
        // |mean dW| < 4 sqrt(dt/M), |mean dW^2 - dt| < 4 dt sqrt(2/M)
        let dt = 1e-3;
        let m = 100_000usize;
        let mut src = WienerSource::new(7, dt);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..m {
            let dw = src.next_dw();
            sum += dw;
            sum_sq += dw * dw;
        }
        let mean = sum / m as f64;
        let mean_sq = sum_sq / m as f64;
        assert!(mean.abs() < 4.0 * (dt / m as f64).sqrt(), "mean {mean:e}");
        assert!(
            (mean_sq - dt).abs() < 4.0 * dt * (2.0 / m as f64).sqrt(),
            "var {mean_sq:e}"
        );
    }
}
