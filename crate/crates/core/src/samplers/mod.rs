//! Posterior samplers on the unconstrained scale: unadjusted Langevin,
//! one- and two-stage Gaussian approximation from the Langevin moment
//! equations, Metropolis-adjusted Langevin, and ABC baselines.

pub mod abc;
mod gaussian;
mod langevin;

pub use gaussian::{one_stage, sample_gaussian_posterior, two_stage, GaussianPosterior};
pub use langevin::{langevin_step, mala, ula, ChainOutput};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{grad_fd, hess_fd, Matrix, RngStream, DEFAULT_H_REL, DEFAULT_H_REL_HESS};

/// A log density on `R^d` with derivatives. Defaults use central finite
/// differences.
pub trait LogDensity: Sync {
    fn dim(&self) -> usize;

    /// `-∞` outside the support or on numerical failure.
    fn log_density(&self, phi: &[f64]) -> f64;

    fn gradient(&self, phi: &[f64]) -> Result<Vec<f64>> {
        grad_fd(|x| self.log_density(x), phi, DEFAULT_H_REL)
    }

    fn hessian(&self, phi: &[f64]) -> Result<Matrix> {
        hess_fd(|x| self.log_density(x), phi, DEFAULT_H_REL_HESS)
    }

    /// Maps a point to the reporting scale.
    fn to_constrained(&self, phi: &[f64]) -> Vec<f64> {
        phi.to_vec()
    }

    /// Starting point for iterative samplers.
    fn initial_point(&self, _rng: &mut RngStream) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}

/// Tuning shared by the gradient-based samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Step constant: `Δτ = c · d^(-9/2)` for a `d`-dimensional target.
    pub c: f64,
    /// Explicit `Δτ`, overriding `c`.
    pub step: Option<f64>,
    /// Stop tolerance on `‖Δθ̄‖`.
    pub eps_mean: f64,
    /// Stop tolerance on `‖ΔΨ‖_F`.
    pub eps_cov: f64,
    /// Iteration cap per stage.
    pub max_iter: usize,
    /// Langevin burn-in `N₀`.
    pub burn_in: usize,
    /// Langevin thinning `δ`.
    pub thin: usize,
    /// Number of posterior draws `B`.
    pub samples: usize,
    /// Covariance recursion starts from `cov_init · I`.
    pub cov_init: f64,
    /// Consecutive growths of `‖ΔΨ‖_F` that trigger a step halving.
    pub growth_window: usize,
    /// Maximum number of step halvings before giving up.
    pub max_halvings: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            c: 0.5,
            step: None,
            eps_mean: 1e-5,
            eps_cov: 1e-5,
            max_iter: 200_000,
            burn_in: 1000,
            thin: 10,
            samples: 100,
            cov_init: 1.0,
            growth_window: 50,
            max_halvings: 30,
        }
    }
}

impl SamplerConfig {
    pub fn step_size(&self, dim: usize) -> f64 {
        self.step.unwrap_or_else(|| self.c * (dim.max(1) as f64).powf(-4.5))
    }

    /// Langevin chain length `N₀ + (B - 1) δ + 1`.
    pub fn chain_length(&self) -> usize {
        self.burn_in + self.samples.saturating_sub(1) * self.thin + 1
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
