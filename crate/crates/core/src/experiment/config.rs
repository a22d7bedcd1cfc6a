use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lna::{FilterSetup, LikelihoodKind, LnaMoments, LnaPosterior, DEFAULT_SUBSTEPS};
use crate::model::{ParamBinding, ParamSpec, ParameterSpace, Prior, ReactionNetwork, Target, Transform};
use crate::numerics::Matrix;
use crate::samplers::abc::AbcOptions;
use crate::samplers::SamplerConfig;
use crate::simulate::{InitialState, ObservationSchedule, ObservationSet};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Ula,
    OneStage,
    TwoStage,
    Mala,
    AbcSmc,
    AbcRejection,
}

impl SamplerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::Ula => "ula",
            SamplerKind::OneStage => "one-stage",
            SamplerKind::TwoStage => "two-stage",
            SamplerKind::Mala => "mala",
            SamplerKind::AbcSmc => "abc-smc",
            SamplerKind::AbcRejection => "abc-rejection",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Config(format!("unknown sampler '{s}'")))
    }

    pub fn is_abc(&self) -> bool {
        matches!(self, SamplerKind::AbcSmc | SamplerKind::AbcRejection)
    }
}

/// Data-generating parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub rates: Vec<f64>,
    /// One standard deviation per observed species.
    pub noise: Vec<f64>,
}

/// An inferred parameter: where it binds, its prior and transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub target: Target,
    pub prior: Prior,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
}

/// What `--H` keeps fixed when it changes the number of intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HOverride {
    /// Keep `[t_start, t_end]`; the spacing shrinks.
    #[default]
    Span,
    /// Keep the spacing; the horizon grows.
    Step,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub intervals: usize,
    pub observed: Vec<usize>,
    #[serde(default)]
    pub h_override: HOverride,
}

impl ScheduleConfig {
    pub fn schedule(&self) -> ObservationSchedule {
        ObservationSchedule::uniform(self.t_start, self.t_end, self.intervals, self.observed.clone())
    }

    pub fn set_intervals(&mut self, h: usize) {
        if self.h_override == HOverride::Step {
            let dt = (self.t_end - self.t_start) / self.intervals as f64;
            self.t_end = self.t_start + dt * h as f64;
        }
        self.intervals = h;
    }
}

/// Filter prior: mean and diagonal of `Γ` at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterInit {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    #[serde(default)]
    pub t0: f64,
}

fn default_schedule() -> Vec<f64> {
    vec![80.0, 40.0, 20.0, 10.0, 5.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbcSettings {
    pub schedule: Vec<f64>,
    pub rejection_eps: f64,
    #[serde(flatten)]
    pub options: AbcOptions,
}

impl Default for AbcSettings {
    fn default() -> Self {
        Self { schedule: default_schedule(), rejection_eps: 5.0, options: AbcOptions::default() }
    }
}

fn one() -> usize {
    1
}
fn default_substeps() -> usize {
    DEFAULT_SUBSTEPS
}
fn default_reps() -> usize {
    20
}

/// Full description of a replicated inference experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub network: ReactionNetwork,
    pub truth: Truth,
    pub parameters: Vec<ParamEntry>,
    pub initial_state: InitialState,
    pub filter_init: FilterInit,
    pub schedule: ScheduleConfig,
    #[serde(default = "one")]
    pub trajectories: usize,
    #[serde(default)]
    pub likelihood: LikelihoodKind,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    pub sampler: SamplerKind,
    #[serde(default)]
    pub tuning: SamplerConfig,
    #[serde(default)]
    pub abc: AbcSettings,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.network.validate().map_err(|e| Error::Config(e.to_string()))?;
        let ns = self.network.num_species();
        if self.truth.rates.len() != self.network.num_params {
            return Err(Error::Config("truth.rates length differs from network parameters".into()));
        }
        if self.truth.noise.len() != self.schedule.observed.len() {
            return Err(Error::Config("truth.noise needs one entry per observed species".into()));
        }
        if self.truth.noise.iter().any(|&s| !(s >= 0.0)) {
            return Err(Error::Config("noise levels must be nonnegative".into()));
        }
        if self.initial_state.mean.len() != ns || self.initial_state.var.len() != ns {
            return Err(Error::Config("initial_state dimension mismatch".into()));
        }
        if self.filter_init.mean.len() != ns || self.filter_init.var.len() != ns {
            return Err(Error::Config("filter_init dimension mismatch".into()));
        }
        if self.schedule.intervals == 0 || !(self.schedule.t_end > self.schedule.t_start) {
            return Err(Error::Config("schedule needs a positive span and at least one interval".into()));
        }
        self.schedule.schedule().validate(ns)?;
        if self.parameters.is_empty() {
            return Err(Error::Config("no parameters to infer".into()));
        }
        self.binding().validate()?;
        self.space()?;
        if self.trajectories == 0 || self.reps == 0 || self.substeps == 0 {
            return Err(Error::Config("trajectories, reps and substeps must be positive".into()));
        }
        if self.tuning.samples == 0 || !(self.tuning.step_size(self.parameters.len()) > 0.0) {
            return Err(Error::Config("sampler needs a positive step and sample count".into()));
        }
        if self.likelihood == LikelihoodKind::EulerTransition
            && (self.schedule.observed != (0..ns).collect::<Vec<_>>() || self.truth.noise.iter().any(|&s| s != 0.0))
        {
            return Err(Error::Config("the transition likelihood needs exact observation of every species".into()));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<ParameterSpace> {
        ParameterSpace::new(
            self.parameters
                .iter()
                .map(|p| ParamSpec { name: p.name.clone(), prior: p.prior, transform: p.transform })
                .collect(),
        )
    }

    pub fn binding(&self) -> ParamBinding {
        ParamBinding {
            rates: self.truth.rates.clone(),
            noise: self.truth.noise.clone(),
            targets: self.parameters.iter().map(|p| p.target).collect(),
        }
    }

    /// True values of the inferred parameters.
    pub fn true_params(&self) -> Vec<f64> {
        self.binding().extract(&self.truth.rates, &self.truth.noise)
    }

    pub fn filter_setup(&self) -> FilterSetup {
        let n = self.filter_init.var.len();
        let cov = Matrix::from_fn(n, n, |i, j| if i == j { self.filter_init.var[i] } else { 0.0 });
        FilterSetup {
            init: LnaMoments { mean: self.filter_init.mean.clone(), cov },
            t0: self.filter_init.t0,
            substeps: self.substeps,
        }
    }

    pub fn posterior(&self, data: Vec<ObservationSet>) -> Result<LnaPosterior> {
        Ok(LnaPosterior {
            net: self.network.clone(),
            space: self.space()?,
            binding: self.binding(),
            data,
            setup: self.filter_setup(),
            kind: self.likelihood,
        })
    }

    pub fn with_intervals(mut self, h: usize) -> Self {
        self.schedule.set_intervals(h);
        self
    }
}
