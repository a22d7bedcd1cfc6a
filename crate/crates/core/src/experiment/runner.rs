use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SamplerKind};
use super::metrics::{rmse, MetricsReport, ParamSummary, Stat};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::samplers::abc::{abc_rejection, abc_smc};
use crate::samplers::{
    mala, one_stage, sample_gaussian_posterior, two_stage, ula, GaussianPosterior, LogDensity, SamplerConfig,
};
use crate::simulate::{simulate_dataset, ObservationSet};

/// Draws on the unconstrained scale plus sampler diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerOutput {
    pub samples: Vec<Vec<f64>>,
    pub gaussian: Option<GaussianPosterior>,
    pub acceptance: Option<f64>,
}

/// Runs a gradient-based sampler against `target`, starting from
/// `target.initial_point`.
pub fn run_target_sampler<T: LogDensity + ?Sized>(
    target: &T,
    kind: SamplerKind,
    tuning: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<SamplerOutput> {
    let init = target.initial_point(rng);
    match kind {
        SamplerKind::Ula => {
            let out = ula(target, tuning, &init, rng)?;
            Ok(SamplerOutput { samples: out.samples, gaussian: None, acceptance: None })
        }
        SamplerKind::OneStage | SamplerKind::TwoStage => {
            let gp = if kind == SamplerKind::OneStage {
                one_stage(target, tuning, &init)?
            } else {
                two_stage(target, tuning, &init)?
            };
            let samples = sample_gaussian_posterior(&gp, tuning.samples, rng)?;
            Ok(SamplerOutput { samples, gaussian: Some(gp), acceptance: None })
        }
        SamplerKind::Mala => {
            let gp = two_stage(target, tuning, &init)?;
            let start = sample_gaussian_posterior(&gp, 1, rng)?.remove(0);
            let out = mala(target, tuning, &start, rng)?;
            let rate = out.acceptance_rate();
            Ok(SamplerOutput { samples: out.samples, gaussian: Some(gp), acceptance: Some(rate) })
        }
        SamplerKind::AbcSmc | SamplerKind::AbcRejection => {
            Err(Error::Config("ABC samplers need a simulator, not a density".into()))
        }
    }
}

/// Outcome of one replication. `samples` are on the constrained scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub rep: usize,
    pub solved: bool,
    pub error: Option<String>,
    pub samples: Vec<Vec<f64>>,
    pub rmse: Vec<f64>,
    pub gaussian: Option<GaussianPosterior>,
    pub acceptance: Option<f64>,
    pub abc_trials: Option<Vec<usize>>,
    pub seconds: f64,
}

impl ReplicationResult {
    pub fn failed(rep: usize, err: &Error, seconds: f64) -> Self {
        Self {
            rep,
            solved: false,
            error: Some(err.to_string()),
            samples: vec![],
            rmse: vec![],
            gaussian: None,
            acceptance: None,
            abc_trials: None,
            seconds,
        }
    }
}

/// Evaluates `f` for every replication index. Results come back in index
/// order whatever the worker count, so outputs do not depend on it.
pub fn run_replications<F>(reps: usize, workers: usize, f: F) -> Vec<ReplicationResult>
where
    F: Fn(usize) -> ReplicationResult + Sync + Send,
{
    if workers == 1 {
        return (0..reps).map(&f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
    match pool {
        Ok(pool) => pool.install(|| (0..reps).into_par_iter().map(&f).collect()),
        Err(_) => (0..reps).map(&f).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub report: MetricsReport,
    pub reps: Vec<ReplicationResult>,
}

/// Synthetic data for replication `rep`; independent of the sampler.
pub fn replicate_data(cfg: &ExperimentConfig, rep: usize) -> Result<Vec<ObservationSet>> {
    let mut rng = RngStream::new(cfg.seed, 2 * rep as u64);
    let (_, data) = simulate_dataset(
        &cfg.network,
        &cfg.initial_state,
        &cfg.truth.rates,
        &cfg.schedule.schedule(),
        &cfg.truth.noise,
        cfg.trajectories,
        &mut rng,
    )?;
    Ok(data)
}

fn run_one(cfg: &ExperimentConfig, rep: usize) -> Result<ReplicationResult> {
    let data = replicate_data(cfg, rep)?;
    infer_replication(cfg, data, rep)
}

/// Runs the configured sampler on `data`, drawing from replication `rep`'s
/// sampler stream.
pub fn infer_replication(cfg: &ExperimentConfig, data: Vec<ObservationSet>, rep: usize) -> Result<ReplicationResult> {
    let mut rng = RngStream::new(cfg.seed, 2 * rep as u64 + 1);
    let truth = cfg.true_params();
    let (samples, gaussian, acceptance, abc_trials) = if cfg.sampler.is_abc() {
        let space = cfg.space()?;
        let binding = cfg.binding();
        let schedule = cfg.schedule.schedule();
        let observed: Vec<f64> = data.iter().flat_map(|o| o.flat()).collect();
        let simulate = |theta: &[f64], rng: &mut RngStream| -> Result<Vec<f64>> {
            let (rates, noise) = binding.apply(theta);
            let (_, sim) =
                simulate_dataset(&cfg.network, &cfg.initial_state, &rates, &schedule, &noise, cfg.trajectories, rng)?;
            Ok(sim.iter().flat_map(|o| o.flat()).collect())
        };
        let b = cfg.tuning.samples;
        let out = if cfg.sampler == SamplerKind::AbcSmc {
            abc_smc(&space, simulate, &observed, &cfg.abc.schedule, b, &cfg.abc.options, &mut rng)?
        } else {
            abc_rejection(&space, simulate, &observed, cfg.abc.rejection_eps, b, &cfg.abc.options, &mut rng)?
        };
        (out.particles, None, None, Some(out.trials))
    } else {
        let post = cfg.posterior(data)?;
        let out = run_target_sampler(&post, cfg.sampler, &cfg.tuning, &mut rng)?;
        let samples: Vec<Vec<f64>> = out.samples.iter().map(|phi| post.space.to_constrained(phi)).collect();
        if samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Diverged("non-finite posterior draw".into()));
        }
        (samples, out.gaussian, out.acceptance, None)
    };
    Ok(ReplicationResult {
        rep,
        solved: true,
        error: None,
        rmse: rmse(&samples, &truth),
        samples,
        gaussian,
        acceptance,
        abc_trials,
        seconds: 0.0,
    })
}

/// Runs every replication of `cfg` and aggregates the metrics.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let reps = run_replications(cfg.reps, cfg.workers, |r| {
        let start = Instant::now();
        match run_one(cfg, r) {
            Ok(mut res) => {
                res.seconds = start.elapsed().as_secs_f64();
                res
            }
            Err(e) => ReplicationResult::failed(r, &e, start.elapsed().as_secs_f64()),
        }
    });
    let report = summarize(cfg, &reps);
    Ok(ExperimentOutput { config: cfg.clone(), report, reps })
}

pub fn summarize(cfg: &ExperimentConfig, reps: &[ReplicationResult]) -> MetricsReport {
    let solved: Vec<&ReplicationResult> = reps.iter().filter(|r| r.solved).collect();
    let truth = cfg.true_params();
    let params = cfg
        .parameters
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let r: Vec<f64> = solved.iter().map(|s| s.rmse[k]).collect();
            let m: Vec<f64> = solved
                .iter()
                .map(|s| s.samples.iter().map(|x| x[k]).sum::<f64>() / s.samples.len().max(1) as f64)
                .collect();
            ParamSummary { name: p.name.clone(), truth: truth[k], rmse: Stat::of(&r), posterior_mean: Stat::of(&m) }
        })
        .collect();
    let gauss = |f: &dyn Fn(&GaussianPosterior) -> f64| {
        Stat::of(&solved.iter().filter_map(|s| s.gaussian.as_ref().map(f)).collect::<Vec<_>>())
    };
    MetricsReport {
        name: cfg.name.clone(),
        sampler: cfg.sampler.name().into(),
        reps: reps.len(),
        solved: solved.len(),
        failed: reps.len() - solved.len(),
        params,
        lambda_max: gauss(&|g| g.lambda_max),
        n1: gauss(&|g| g.n1 as f64),
        n2: gauss(&|g| g.n2 as f64),
        hessian_evals: gauss(&|g| g.hessian_evals as f64),
        acceptance_rate: Stat::of(&solved.iter().filter_map(|s| s.acceptance).collect::<Vec<_>>()),
        failures: reps.iter().filter_map(|r| r.error.clone().map(|e| (r.rep, e))).collect(),
    }
}
