//! Deterministic noise that hides the dependency structure of a problem.
//!
//! When the unitation of the noise variables is a multiple of the modulus,
//! every value below the noise level is lifted to that level. Solutions at or
//! above the level are never touched, so the best local optima keep their
//! positions while the gate creates non-monotonic dependencies among the
//! noise variables and everything they touch.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Objective;
use crate::rng::RngStream;

/// How far `f_true` falls short of the noise level.
pub fn shortfall(f_true: f64, level: f64) -> f64 {
    if f_true >= level {
        0.0
    } else {
        level - f_true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    noise_vars: Vec<usize>,
    level: f64,
    modulus: u32,
    seed: u64,
}

impl NoiseConfig {
    /// Draws `round(size_percent * n / 100)` noise variables uniformly
    /// without replacement.
    pub fn draw(n: usize, size_percent: f64, level: f64, modulus: u32, seed: u64) -> Result<Self> {
        if !(0.0..=100.0).contains(&size_percent) {
            return Err(Error::InvalidParameter(format!(
                "noise size must be a percentage in [0, 100], got {size_percent}"
            )));
        }
        let size = ((size_percent / 100.0) * n as f64).round() as usize;
        let mut rng = RngStream::new(seed);
        let mut vars = sample(&mut rng, n, size).into_vec();
        vars.sort_unstable();
        Self::with_vars(vars, level, modulus, seed)
    }

    pub fn with_vars(mut noise_vars: Vec<usize>, level: f64, modulus: u32, seed: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidParameter("noise modulus must be at least 1".into()));
        }
        if !level.is_finite() {
            return Err(Error::InvalidParameter("noise level must be finite".into()));
        }
        noise_vars.sort_unstable();
        noise_vars.dedup();
        Ok(NoiseConfig {
            noise_vars,
            level,
            modulus,
            seed,
        })
    }

    pub fn noise_vars(&self) -> &[usize] {
        &self.noise_vars
    }

    pub fn size(&self) -> usize {
        self.noise_vars.len()
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An empty noise set never opens the gate, so zero-size noise is the
    /// undisturbed problem.
    pub fn gate_open(&self, bits: &[bool]) -> bool {
        if self.noise_vars.is_empty() {
            return false;
        }
        let u = self.noise_vars.iter().filter(|&&i| bits[i]).count() as u32;
        u.is_multiple_of(self.modulus)
    }

    pub fn apply(&self, f_true: f64, bits: &[bool]) -> f64 {
        if self.gate_open(bits) {
            f_true + shortfall(f_true, self.level)
        } else {
            f_true
        }
    }
}

/// Evaluates `inner` through the noise wrapper.
pub fn noised_evaluate(cfg: &NoiseConfig, inner: &dyn Objective, bits: &[bool]) -> f64 {
    assert_eq!(
        bits.len(),
        inner.num_vars(),
        "solution length does not match the instance"
    );
    cfg.apply(inner.value(bits), bits)
}
