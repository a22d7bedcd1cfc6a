use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Map between a parameter's constrained scale `θ` and the unconstrained
/// scale `φ` the samplers move on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    /// `φ = log θ`.
    Log,
    /// `φ = log((θ - lo) / (hi - θ))`.
    Logit { lo: f64, hi: f64 },
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl Transform {
    pub fn to_unconstrained(&self, theta: f64) -> Result<f64> {
        match *self {
            Transform::Identity => Ok(theta),
            Transform::Log => {
                if theta > 0.0 {
                    Ok(theta.ln())
                } else {
                    Err(Error::Domain(format!("log transform of {theta}")))
                }
            }
            Transform::Logit { lo, hi } => {
                if theta > lo && theta < hi {
                    Ok(((theta - lo) / (hi - theta)).ln())
                } else {
                    Err(Error::Domain(format!("logit transform of {theta} outside ({lo}, {hi})")))
                }
            }
        }
    }

    pub fn to_constrained(&self, phi: f64) -> f64 {
        match *self {
            Transform::Identity => phi,
            Transform::Log => phi.exp(),
            Transform::Logit { lo, hi } => {
                let sig = if phi >= 0.0 {
                    1.0 / (1.0 + (-phi).exp())
                } else {
                    let e = phi.exp();
                    e / (1.0 + e)
                };
                lo + (hi - lo) * sig
            }
        }
    }

    /// `log |dθ/dφ|` at `φ`.
    pub fn log_abs_jacobian(&self, phi: f64) -> f64 {
        match *self {
            Transform::Identity => 0.0,
            Transform::Log => phi,
            Transform::Logit { lo, hi } => (hi - lo).ln() - softplus(phi) - softplus(-phi),
        }
    }
}

/// Independent prior on a single constrained-scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prior {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl Prior {
    pub fn log_density(&self, theta: f64) -> f64 {
        match *self {
            Prior::Uniform { lo, hi } => {
                if theta >= lo && theta <= hi {
                    -(hi - lo).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Prior::Gaussian { mean, sd } => {
                let z = (theta - mean) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match *self {
            Prior::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform_open(),
            Prior::Gaussian { mean, sd } => mean + sd * rng.normal(),
        }
    }

    /// Width of the support, or four standard deviations for a Gaussian.
    pub fn range(&self) -> f64 {
        match *self {
            Prior::Uniform { lo, hi } => hi - lo,
            Prior::Gaussian { sd, .. } => 4.0 * sd,
        }
    }

    fn default_transform(&self) -> Transform {
        match *self {
            Prior::Uniform { lo, hi } => Transform::Logit { lo, hi },
            Prior::Gaussian { .. } => Transform::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub prior: Prior,
    /// Defaults to logit over a uniform prior's bounds, identity otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
}

impl ParamSpec {
    pub fn new(name: &str, prior: Prior) -> Self {
        Self { name: name.into(), prior, transform: None }
    }

    pub fn with_transform(mut self, t: Transform) -> Self {
        self.transform = Some(t);
        self
    }

    pub fn transform(&self) -> Transform {
        self.transform.unwrap_or_else(|| self.prior.default_transform())
    }
}

/// Ordered inferred parameters with their priors and transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub params: Vec<ParamSpec>,
}

impl ParameterSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        let space = Self { params };
        space.validate()?;
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Rejects priors with empty support and transforms that do not map
    /// the prior's support onto the reals. A log transform is allowed over
    /// a uniform prior on a nonnegative interval; values of `φ` beyond the
    /// upper bound then carry zero prior mass.
    pub fn validate(&self) -> Result<()> {
        for p in &self.params {
            match p.prior {
                Prior::Uniform { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                    return Err(Error::Config(format!("{}: empty uniform support", p.name)))
                }
                Prior::Gaussian { sd, .. } if !(sd > 0.0) => {
                    return Err(Error::Config(format!("{}: nonpositive prior sd", p.name)))
                }
                _ => {}
            }
            match (p.transform(), p.prior) {
                (Transform::Identity, _) => {}
                (Transform::Log, Prior::Uniform { lo, .. }) if lo >= 0.0 => {}
                (Transform::Logit { lo, hi }, Prior::Uniform { lo: a, hi: b })
                    if lo == a && hi == b => {}
                (t, prior) => {
                    return Err(Error::Config(format!(
                        "{}: transform {t:?} incompatible with prior {prior:?}",
                        p.name
                    )))
                }
            }
        }
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} parameters",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn to_unconstrained(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check(theta)?;
        theta
            .iter()
            .zip(&self.params)
            .map(|(&t, p)| p.transform().to_unconstrained(t))
            .collect()
    }

    pub fn to_constrained(&self, phi: &[f64]) -> Vec<f64> {
        phi.iter().zip(&self.params).map(|(&f, p)| p.transform().to_constrained(f)).collect()
    }

    pub fn log_prior(&self, theta: &[f64]) -> f64 {
        theta.iter().zip(&self.params).map(|(&t, p)| p.prior.log_density(t)).sum()
    }

    /// Prior log density of `φ`, including the change-of-variables term.
    pub fn log_prior_unconstrained(&self, phi: &[f64]) -> f64 {
        phi.iter()
            .zip(&self.params)
            .map(|(&f, p)| {
                let t = p.transform();
                match (t, p.prior) {
                    // Closed form keeps the density finite when θ rounds onto a bound.
                    (Transform::Logit { .. }, Prior::Uniform { .. }) => -softplus(f) - softplus(-f),
                    _ => p.prior.log_density(t.to_constrained(f)) + t.log_abs_jacobian(f),
                }
            })
            .sum()
    }

    /// One constrained-scale draw from the prior.
    pub fn sample_prior(&self, rng: &mut RngStream) -> Vec<f64> {
        self.params.iter().map(|p| p.prior.sample(rng)).collect()
    }
}
