use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where an inferred parameter lands in the model: a rate constant or the
/// noise standard deviation of an observed species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Rate(usize),
    Noise(usize),
}

/// Fixed rate constants and noise levels, overwritten by inferred values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBinding {
    pub rates: Vec<f64>,
    pub noise: Vec<f64>,
    pub targets: Vec<Target>,
}

impl ParamBinding {
    pub fn validate(&self) -> Result<()> {
        for t in &self.targets {
            let ok = match *t {
                Target::Rate(i) => i < self.rates.len(),
                Target::Noise(j) => j < self.noise.len(),
            };
            if !ok {
                return Err(Error::Config(format!("binding target {t:?} out of range")));
            }
        }
        Ok(())
    }

    /// Rate constants and noise levels with `theta` substituted.
    pub fn apply(&self, theta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut rates = self.rates.clone();
        let mut noise = self.noise.clone();
        for (t, &v) in self.targets.iter().zip(theta) {
            match *t {
                Target::Rate(i) => rates[i] = v,
                Target::Noise(j) => noise[j] = v,
            }
        }
        (rates, noise)
    }

    /// The values of the bound entries, i.e. the inverse of [`apply`](Self::apply).
    pub fn extract(&self, rates: &[f64], noise: &[f64]) -> Vec<f64> {
        self.targets
            .iter()
            .map(|t| match *t {
                Target::Rate(i) => rates[i],
                Target::Noise(j) => noise[j],
            })
            .collect()
    }
}
