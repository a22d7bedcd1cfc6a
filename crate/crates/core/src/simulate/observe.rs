use serde::{Deserialize, Serialize};

use super::{gillespie, Trajectory};
use crate::error::{Error, Result};
use crate::model::ReactionNetwork;
use crate::numerics::{Matrix, RngStream};

/// Observation times and the observed species (rows of the selection
/// matrix `G`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSchedule {
    pub times: Vec<f64>,
    pub observed: Vec<usize>,
}

impl ObservationSchedule {
    /// `intervals + 1` evenly spaced times on `[t_start, t_end]`.
    pub fn uniform(t_start: f64, t_end: f64, intervals: usize, observed: Vec<usize>) -> Self {
        let dt = (t_end - t_start) / intervals as f64;
        let times = (0..=intervals).map(|k| t_start + k as f64 * dt).collect();
        Self { times, observed }
    }

    pub fn validate(&self, num_species: usize) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::Config("observation schedule has no times".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("observation times must be strictly increasing".into()));
        }
        if self.observed.is_empty() || self.observed.iter().any(|&i| i >= num_species) {
            return Err(Error::Config(format!(
                "observed species {:?} invalid for {num_species} species",
                self.observed
            )));
        }
        Ok(())
    }

    pub fn selection_matrix(&self, num_species: usize) -> Matrix {
        let mut g = Matrix::zeros(self.observed.len(), num_species);
        for (row, &i) in self.observed.iter().enumerate() {
            g[(row, i)] = 1.0;
        }
        g
    }
}

/// Noisy observations of one trajectory: `values[h][j]` observes species
/// `observed[j]` at `times[h]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub times: Vec<f64>,
    pub observed: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl ObservationSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// All values in time-major order.
    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().flatten().cloned().collect()
    }
}

/// `y = G s + ε`, `ε ~ N(0, diag(noise_sd²))`, for each state in `states`
/// (one per schedule time).
pub fn observe(
    states: &[Vec<f64>],
    schedule: &ObservationSchedule,
    noise_sd: &[f64],
    rng: &mut RngStream,
) -> Result<ObservationSet> {
    if states.len() != schedule.times.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states for {} observation times",
            states.len(),
            schedule.times.len()
        )));
    }
    if noise_sd.len() != schedule.observed.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} noise levels for {} observed species",
            noise_sd.len(),
            schedule.observed.len()
        )));
    }
    let values = states
        .iter()
        .map(|s| {
            schedule
                .observed
                .iter()
                .zip(noise_sd)
                .map(|(&i, &sd)| if sd == 0.0 { s[i] } else { s[i] + sd * rng.normal() })
                .collect()
        })
        .collect();
    Ok(ObservationSet { times: schedule.times.clone(), observed: schedule.observed.clone(), values })
}

/// Gaussian initial-state distribution with diagonal covariance. With
/// `round`, draws are rounded to the nearest nonnegative integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    #[serde(default = "yes")]
    pub round: bool,
}

fn yes() -> bool {
    true
}

impl InitialState {
    pub fn fixed(mean: Vec<f64>) -> Self {
        let var = vec![0.0; mean.len()];
        Self { mean, var, round: true }
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.var)
            .map(|(&m, &v)| {
                let x = if v > 0.0 { m + v.sqrt() * rng.normal() } else { m };
                if self.round {
                    x.round().max(0.0)
                } else {
                    x
                }
            })
            .collect()
    }
}

/// Simulates `m` exact trajectories out to the last observation time and
/// observes each one on the schedule.
pub fn simulate_dataset(
    net: &ReactionNetwork,
    init: &InitialState,
    theta: &[f64],
    schedule: &ObservationSchedule,
    noise_sd: &[f64],
    m: usize,
    rng: &mut RngStream,
) -> Result<(Vec<Trajectory>, Vec<ObservationSet>)> {
    schedule.validate(net.num_species())?;
    let t_end = *schedule.times.last().unwrap();
    let mut trajs = Vec::with_capacity(m);
    let mut obs = Vec::with_capacity(m);
    for _ in 0..m {
        let s0 = init.sample(rng);
        let tr = gillespie(net, &s0, theta, t_end, rng)?;
        let states = tr.sample_at(&schedule.times);
        obs.push(observe(&states, schedule, noise_sd, rng)?);
        trajs.push(tr);
    }
    Ok((trajs, obs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_full_observation_is_exact() {
        let sched = ObservationSchedule::uniform(0.0, 2.0, 2, vec![0, 1]);
        let states = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        let mut rng = RngStream::new(0, 0);
        let y = observe(&states, &sched, &[0.0, 0.0], &mut rng).unwrap();
        assert_eq!(y.values, states);
    }

    #[test]
    fn noise_has_requested_sd() {
        let sched = ObservationSchedule { times: vec![0.0], observed: vec![0] };
        let mut rng = RngStream::new(2, 0);
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| observe(&[vec![10.0]], &sched, &[4.0], &mut rng).unwrap().values[0][0])
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((sd / 4.0 - 1.0).abs() < 0.02, "sd {sd}");
    }

    #[test]
    fn selection_matrix_picks_species() {
        let g = ObservationSchedule { times: vec![0.0], observed: vec![3] }.selection_matrix(4);
        assert_eq!(g, Matrix::from_row_slice(1, 4, &[0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn initial_state_rounds_nonnegative() {
        let init = InitialState { mean: vec![0.2, 5.0], var: vec![4.0, 1.0], round: true };
        let mut rng = RngStream::new(8, 0);
        for _ in 0..200 {
            let s = init.sample(&mut rng);
            assert!(s.iter().all(|&x| x >= 0.0 && x.fract() == 0.0));
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(ObservationSchedule { times: vec![1.0, 1.0], observed: vec![0] }.validate(2).is_err());
        assert!(ObservationSchedule { times: vec![1.0], observed: vec![5] }.validate(2).is_err());
    }
}
