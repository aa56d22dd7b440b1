//! Seeded Brownian increments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden-ratio increment used to spread trial indices before mixing.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial`: `splitmix64(base + (trial + 1)·γ)` with wrapping arithmetic.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(trial.wrapping_add(1).wrapping_mul(GAMMA)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    pub base_seed: u64,
    pub dt: f64,
    pub steps: usize,
    pub dims: usize,
}

impl DriverConfig {
    pub fn new(base_seed: u64, dt: f64, steps: usize, dims: usize) -> Result<Self> {
        let d = DriverConfig { base_seed, dt, steps, dims };
        d.validate()?;
        Ok(d)
    }

    /// Step count rounded from a horizon.
    pub fn with_horizon(base_seed: u64, dt: f64, horizon: f64, dims: usize) -> Result<Self> {
        if !(horizon >= 0.0) || !horizon.is_finite() {
            return Err(Error::Usage(format!("horizon must be a finite non-negative number, got {horizon}")));
        }
        Self::new(base_seed, dt, (horizon / dt).round() as usize, dims)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Usage(format!("dt must be positive, got {}", self.dt)));
        }
        if !(1..=2).contains(&self.dims) {
            return Err(Error::Usage(format!("dims must be 1 or 2, got {}", self.dims)));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Increments `ΔB ~ N(0, dt)` for one trial, laid out step-major.
    pub fn increments(&self, trial: u64) -> Increments {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(self.base_seed, trial));
        let sd = self.dt.sqrt();
        let data = (0..self.steps * self.dims)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x * sd
            })
            .collect();
        Increments { dims: self.dims, data }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Increments {
    dims: usize,
    data: Vec<f64>,
}

impl Increments {
    pub fn from_data(dims: usize, data: Vec<f64>) -> Result<Self> {
        if dims == 0 || data.len() % dims != 0 {
            return Err(Error::Usage("increment data does not match the dimension".into()));
        }
        Ok(Increments { dims, data })
    }
    pub fn dims(&self) -> usize {
        self.dims
    }
    pub fn steps(&self) -> usize {
        self.data.len() / self.dims
    }
    /// `ΔB` at a step, one entry per component.
    pub fn step(&self, k: usize) -> &[f64] {
        &self.data[k * self.dims..(k + 1) * self.dims]
    }
    /// Running sum of one component, starting at 0.
    pub fn path(&self, dim: usize) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for k in 0..self.steps() {
            acc += self.step(k)[dim];
            out.push(acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let d = DriverConfig::new(42, 0.01, 100, 2).unwrap();
        assert_eq!(d.increments(3), d.increments(3));
        assert_ne!(d.increments(3), d.increments(4));
        let z = DriverConfig::new(42, 0.01, 0, 1).unwrap();
        assert_eq!(z.increments(0).steps(), 0);
    }

    #[test]
    fn increment_variance_is_dt() {
        let d = DriverConfig::new(7, 0.25, 40_000, 1).unwrap();
        let inc = d.increments(0);
        let n = inc.steps() as f64;
        let mean: f64 = (0..inc.steps()).map(|k| inc.step(k)[0]).sum::<f64>() / n;
        let var: f64 = (0..inc.steps()).map(|k| (inc.step(k)[0] - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01);
        assert!((var - 0.25).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(DriverConfig::new(0, 0.0, 1, 1).is_err());
        assert!(DriverConfig::new(0, 0.1, 1, 3).is_err());
    }
}
