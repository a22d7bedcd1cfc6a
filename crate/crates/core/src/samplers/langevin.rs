use super::{LogDensity, SamplerConfig};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Thinned draws from a Langevin chain on the unconstrained scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub samples: Vec<Vec<f64>>,
    pub steps: usize,
    pub accepted: usize,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.steps.max(1) as f64
    }
}

/// `φ + ∇ Δτ + √(2Δτ) z`.
pub fn langevin_step(phi: &[f64], grad: &[f64], dt: f64, z: &[f64]) -> Vec<f64> {
    let s = (2.0 * dt).sqrt();
    phi.iter().zip(grad).zip(z).map(|((p, g), z)| p + g * dt + s * z).collect()
}

fn keep(k: usize, cfg: &SamplerConfig) -> bool {
    k > cfg.burn_in && (k - cfg.burn_in - 1) % cfg.thin.max(1) == 0
}

/// Unadjusted Langevin algorithm. Fails on a non-finite gradient or state.
pub fn ula<T: LogDensity + ?Sized>(
    target: &T,
    cfg: &SamplerConfig,
    init: &[f64],
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    let dt = cfg.step_size(target.dim());
    let total = cfg.chain_length();
    let mut phi = init.to_vec();
    let mut samples = Vec::with_capacity(cfg.samples);
    for k in 1..=total {
        let g = target
            .gradient(&phi)
            .map_err(|e| Error::Diverged(format!("ULA step {k}: {e}")))?;
        let z = rng.normals(phi.len());
        phi = langevin_step(&phi, &g, dt, &z);
        if phi.iter().any(|x| !x.is_finite()) {
            return Err(Error::Diverged(format!("ULA state non-finite at step {k}")));
        }
        if keep(k, cfg) {
            samples.push(phi.clone());
        }
    }
    Ok(ChainOutput { samples, steps: total, accepted: total })
}

/// Metropolis-adjusted Langevin started at `init` (typically a draw from a
/// Gaussian approximation). Proposals with non-finite density or gradient
/// are rejected.
pub fn mala<T: LogDensity + ?Sized>(
    target: &T,
    cfg: &SamplerConfig,
    init: &[f64],
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    let dt = cfg.step_size(target.dim());
    let total = cfg.chain_length();
    let log_q = |to: &[f64], from: &[f64], g: &[f64]| -> f64 {
        -to.iter()
            .zip(from)
            .zip(g)
            .map(|((t, f), g)| (t - f - g * dt).powi(2))
            .sum::<f64>()
            / (4.0 * dt)
    };
    let mut phi = init.to_vec();
    let mut lp = target.log_density(&phi);
    if !lp.is_finite() {
        return Err(Error::Diverged("MALA start has zero density".into()));
    }
    let mut g = target.gradient(&phi)?;
    let mut accepted = 0;
    let mut samples = Vec::with_capacity(cfg.samples);
    for k in 1..=total {
        let z = rng.normals(phi.len());
        let prop = langevin_step(&phi, &g, dt, &z);
        let u = rng.uniform_open();
        let lp_new = target.log_density(&prop);
        if lp_new.is_finite() {
            if let Ok(g_new) = target.gradient(&prop) {
                let log_a = lp_new - lp + log_q(&phi, &prop, &g_new) - log_q(&prop, &phi, &g);
                if u.ln() < log_a {
                    phi = prop;
                    lp = lp_new;
                    g = g_new;
                    accepted += 1;
                }
            }
        }
        if keep(k, cfg) {
            samples.push(phi.clone());
        }
    }
    Ok(ChainOutput { samples, steps: total, accepted })
}
