use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ReactionNetwork;
use crate::numerics::RngStream;

/// Event budget for a single simulation before it is declared runaway.
pub const DEFAULT_MAX_EVENTS: usize = 50_000_000;

/// Piecewise-constant jump path: `states[k]` holds on `[times[k], times[k+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub t_end: f64,
}

impl Trajectory {
    /// Left-continuous value at `t`: the state in force just before `t`
    /// (the initial state for `t` at or before the start).
    pub fn state_at(&self, t: f64) -> &[f64] {
        let k = self.times.partition_point(|&s| s < t);
        &self.states[k.saturating_sub(1)]
    }

    pub fn sample_at(&self, times: &[f64]) -> Vec<Vec<f64>> {
        times.iter().map(|&t| self.state_at(t).to_vec()).collect()
    }

    pub fn num_events(&self) -> usize {
        self.times.len() - 1
    }
}

/// Exact stochastic simulation (direct method) on `[0, t_end]`.
pub fn gillespie(
    net: &ReactionNetwork,
    s0: &[f64],
    theta: &[f64],
    t_end: f64,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    gillespie_bounded(net, s0, theta, t_end, DEFAULT_MAX_EVENTS, rng)
}

pub(crate) fn gillespie_bounded(
    net: &ReactionNetwork,
    s0: &[f64],
    theta: &[f64],
    t_end: f64,
    max_events: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    let mut a = net.propensities(s0, theta)?;
    if s0.iter().any(|&x| x < 0.0 || x.fract() != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial state must be nonnegative integers: {s0:?}"
        )));
    }
    if !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative horizon {t_end}")));
    }
    let nr = net.num_reactions();
    let ns = net.num_species();
    let mut s = s0.to_vec();
    let mut t = 0.0;
    let mut traj = Trajectory { times: vec![0.0], states: vec![s.clone()], t_end };
    loop {
        let a0: f64 = a.iter().sum();
        if !(a0 > 0.0) {
            if a0.is_nan() || a.iter().any(|&x| x < 0.0) {
                return Err(Error::NonFinite(format!("propensities {a:?}")));
            }
            break;
        }
        t += rng.exp1() / a0;
        if t > t_end {
            break;
        }
        let target = rng.uniform() * a0;
        let mut acc = 0.0;
        let mut r = nr - 1;
        for (k, &ak) in a.iter().enumerate() {
            acc += ak;
            if target < acc {
                r = k;
                break;
            }
        }
        for (i, x) in s.iter_mut().enumerate().take(ns) {
            *x += net.stoich(i, r);
        }
        traj.times.push(t);
        traj.states.push(s.clone());
        if traj.times.len() > max_events {
            return Err(Error::IntegrationDiverged(format!(
                "more than {max_events} events before t = {t}"
            )));
        }
        net.rates_into(&s, theta, &mut a);
        a.iter_mut().for_each(|x| *x *= net.system_size);
    }
    Ok(traj)
}
