//! Likelihood-free baselines: rejection ABC and sequential Monte Carlo ABC
//! with a Gaussian perturbation kernel. Both work on the constrained scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ParameterSpace;
use crate::numerics::RngStream;

/// Euclidean distance between observed and simulated data.
pub fn discrepancy(observed: &[f64], simulated: &[f64]) -> Result<f64> {
    if observed.len() != simulated.len() {
        return Err(Error::DimensionMismatch(format!(
            "observed {} values, simulated {}",
            observed.len(),
            simulated.len()
        )));
    }
    Ok(observed.iter().zip(simulated).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbcOptions {
    /// Trials per acceptance-rate check.
    pub trial_window: usize,
    /// Minimum acceptance rate over a window before giving up.
    pub min_rate: f64,
    /// Per-parameter kernel standard deviations; defaults to 5% of each
    /// prior's range.
    pub kernel_sd: Option<Vec<f64>>,
}

impl Default for AbcOptions {
    fn default() -> Self {
        Self { trial_window: 1_000_000, min_rate: 1e-6, kernel_sd: None }
    }
}

/// Final particle population and per-level bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcOutput {
    pub particles: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub trials: Vec<usize>,
}

struct RateMonitor {
    window: usize,
    min_rate: f64,
    trials: usize,
    accepted: usize,
}

impl RateMonitor {
    fn new(opts: &AbcOptions) -> Self {
        Self { window: opts.trial_window.max(1), min_rate: opts.min_rate, trials: 0, accepted: 0 }
    }

    fn record(&mut self, accepted: bool) -> Result<()> {
        self.trials += 1;
        self.accepted += accepted as usize;
        if self.trials == self.window {
            let rate = self.accepted as f64 / self.window as f64;
            if rate < self.min_rate {
                return Err(Error::InfeasibleThreshold { rate, min_rate: self.min_rate });
            }
            self.trials = 0;
            self.accepted = 0;
        }
        Ok(())
    }
}

fn distance_or_inf<S>(simulate: &mut S, theta: &[f64], observed: &[f64], rng: &mut RngStream) -> Result<f64>
where
    S: FnMut(&[f64], &mut RngStream) -> Result<Vec<f64>>,
{
    match simulate(theta, rng) {
        Ok(x) => discrepancy(observed, &x),
        Err(Error::DimensionMismatch(m)) => Err(Error::DimensionMismatch(m)),
        Err(_) => Ok(f64::INFINITY),
    }
}

/// Keeps prior draws whose simulated data lie within `eps` of `observed`.
pub fn abc_rejection<S>(
    space: &ParameterSpace,
    mut simulate: S,
    observed: &[f64],
    eps: f64,
    count: usize,
    opts: &AbcOptions,
    rng: &mut RngStream,
) -> Result<AbcOutput>
where
    S: FnMut(&[f64], &mut RngStream) -> Result<Vec<f64>>,
{
    let mut monitor = RateMonitor::new(opts);
    let mut particles = Vec::with_capacity(count);
    let mut trials = 0;
    while particles.len() < count {
        let theta = space.sample_prior(rng);
        trials += 1;
        let ok = distance_or_inf(&mut simulate, &theta, observed, rng)? <= eps;
        if ok {
            particles.push(theta);
        }
        monitor.record(ok)?;
    }
    Ok(AbcOutput { weights: vec![1.0 / count as f64; count], particles, epsilons: vec![eps], trials: vec![trials] })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn pick(weights: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Effective sample size of normalized weights.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Sequential ABC over a decreasing threshold schedule. The population
/// starts from the prior; each level perturbs resampled particles with a
/// Gaussian kernel, reweights by `prior / Σ_j w_j K(θ* | θ_j)` and
/// resamples back to uniform weights.
pub fn abc_smc<S>(
    space: &ParameterSpace,
    mut simulate: S,
    observed: &[f64],
    schedule: &[f64],
    count: usize,
    opts: &AbcOptions,
    rng: &mut RngStream,
) -> Result<AbcOutput>
where
    S: FnMut(&[f64], &mut RngStream) -> Result<Vec<f64>>,
{
    if count == 0 {
        return Err(Error::InvalidArgument("ABC population must be nonempty".into()));
    }
    if schedule.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("ABC schedule must be non-increasing".into()));
    }
    let d = space.dim();
    let sd: Vec<f64> = match &opts.kernel_sd {
        Some(v) if v.len() == d => v.clone(),
        Some(v) => {
            return Err(Error::DimensionMismatch(format!("{} kernel widths for {d} parameters", v.len())))
        }
        None => space.params.iter().map(|p| 0.05 * p.prior.range()).collect(),
    };
    let log_norm: f64 = sd.iter().map(|s| -(s * (2.0 * std::f64::consts::PI).sqrt()).ln()).sum();
    let log_kernel = |to: &[f64], from: &[f64]| -> f64 {
        log_norm - 0.5 * to.iter().zip(from).zip(&sd).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>()
    };

    let mut particles: Vec<Vec<f64>> = (0..count).map(|_| space.sample_prior(rng)).collect();
    let mut weights = vec![1.0 / count as f64; count];
    let mut at_prior = true;
    let mut trials = Vec::with_capacity(schedule.len());
    let mut monitor = RateMonitor::new(opts);
    for (level, &eps) in schedule.iter().enumerate() {
        if eps.is_infinite() && at_prior {
            trials.push(0);
            continue;
        }
        at_prior = false;
        let mut next = Vec::with_capacity(count);
        let mut log_w = Vec::with_capacity(count);
        let mut level_trials = 0;
        let log_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        while next.len() < count {
            let j = pick(&weights, rng);
            let cand: Vec<f64> = particles[j].iter().zip(&sd).map(|(t, s)| t + s * rng.normal()).collect();
            level_trials += 1;
            let lp = space.log_prior(&cand);
            let ok = lp.is_finite() && distance_or_inf(&mut simulate, &cand, observed, rng)? <= eps;
            monitor.record(ok)?;
            if !ok {
                continue;
            }
            let terms: Vec<f64> =
                particles.iter().zip(&log_weights).map(|(p, lw)| lw + log_kernel(&cand, p)).collect();
            log_w.push(lp - log_sum_exp(&terms));
            next.push(cand);
        }
        let lse = log_sum_exp(&log_w);
        let w: Vec<f64> = log_w.iter().map(|l| (l - lse).exp()).collect();
        let ess = effective_sample_size(&w);
        if ess < 2.0 {
            return Err(Error::Degenerate { level: level + 1, ess });
        }
        particles = (0..count).map(|_| next[pick(&w, rng)].clone()).collect();
        weights = vec![1.0 / count as f64; count];
        trials.push(level_trials);
    }
    Ok(AbcOutput { particles, weights, epsilons: schedule.to_vec(), trials })
}
