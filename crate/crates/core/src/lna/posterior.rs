use serde::{Deserialize, Serialize};

use super::{euler_transition_loglik, log_likelihood, FilterSetup};
use crate::model::{ParamBinding, ParameterSpace, ReactionNetwork};
use crate::numerics::RngStream;
use crate::samplers::LogDensity;
use crate::simulate::ObservationSet;

/// Which likelihood backs the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LikelihoodKind {
    /// Linear-noise filter over sparse, noisy, partial observations.
    #[default]
    Filter,
    /// Euler-Maruyama transition density over dense exact observations.
    EulerTransition,
}

/// Log posterior on the unconstrained scale for a reaction network.
#[derive(Debug, Clone)]
pub struct LnaPosterior {
    pub net: ReactionNetwork,
    pub space: ParameterSpace,
    pub binding: ParamBinding,
    pub data: Vec<ObservationSet>,
    pub setup: FilterSetup,
    pub kind: LikelihoodKind,
}

impl LnaPosterior {
    /// Log-likelihood at constrained parameters `theta`.
    pub fn log_likelihood(&self, theta: &[f64]) -> f64 {
        let (rates, noise) = self.binding.apply(theta);
        match self.kind {
            LikelihoodKind::Filter => log_likelihood(&self.net, &rates, &noise, &self.data, &self.setup),
            LikelihoodKind::EulerTransition => euler_transition_loglik(&self.net, &rates, &self.data),
        }
    }
}

impl LogDensity for LnaPosterior {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn log_density(&self, phi: &[f64]) -> f64 {
        let lp = self.space.log_prior_unconstrained(phi);
        if !lp.is_finite() {
            return f64::NEG_INFINITY;
        }
        let ll = self.log_likelihood(&self.space.to_constrained(phi));
        if ll.is_finite() {
            lp + ll
        } else {
            f64::NEG_INFINITY
        }
    }

    fn to_constrained(&self, phi: &[f64]) -> Vec<f64> {
        self.space.to_constrained(phi)
    }

    fn initial_point(&self, rng: &mut RngStream) -> Vec<f64> {
        let theta = self.space.sample_prior(rng);
        self.space.to_unconstrained(&theta).unwrap_or_else(|_| vec![0.0; self.dim()])
    }
}
