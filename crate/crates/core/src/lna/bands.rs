use serde::{Deserialize, Serialize};

use super::{filter, LnaPosterior, Propagator};
use crate::error::{Error, Result};
use crate::numerics::{mvn_sample, RngStream};

/// Posterior-predictive summary of one species at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub time: f64,
    pub species: usize,
    pub mean: f64,
    pub lo95: f64,
    pub hi95: f64,
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Reconstructs the hidden path of trajectory `which` on `grid`.
///
/// For each of `draws` posterior draws (cycling through `thetas`, given on
/// the constrained scale) the filter is run, its filtered moments are
/// propagated to each grid time, and a state is sampled. Rows report the
/// sample mean and central 95% interval per time and species.
pub fn infer_trajectory(
    post: &LnaPosterior,
    thetas: &[Vec<f64>],
    which: usize,
    grid: &[f64],
    draws: usize,
    rng: &mut RngStream,
) -> Result<Vec<BandRow>> {
    let obs = post
        .data
        .get(which)
        .ok_or_else(|| Error::InvalidArgument(format!("no trajectory {which}")))?;
    if thetas.is_empty() || draws == 0 {
        return Err(Error::InvalidArgument("need at least one parameter draw".into()));
    }
    let net = &post.net;
    let ns = net.num_species();
    let omega = net.system_size;
    let mut prop = Propagator::new(net, post.setup.substeps);
    let mut samples = vec![vec![Vec::with_capacity(draws); ns]; grid.len()];
    for d in 0..draws {
        let (rates, noise) = post.binding.apply(&thetas[d % thetas.len()]);
        let steps = filter(&mut prop, &rates, &noise, obs, &post.setup)?;
        for (gi, &t) in grid.iter().enumerate() {
            let k = steps.partition_point(|s| s.time <= t);
            let (base, t_base) = if k == 0 {
                (&post.setup.init, post.setup.t0)
            } else {
                (&steps[k - 1].updated, steps[k - 1].time)
            };
            if t < t_base {
                return Err(Error::InvalidArgument(format!("grid time {t} precedes the initial time")));
            }
            let m = if t > t_base { prop.propagate(base, &rates, t_base, t)? } else { base.clone() };
            let x = mvn_sample(&m.mean, &(m.cov / omega), rng)?;
            for i in 0..ns {
                samples[gi][i].push(x[i]);
            }
        }
    }
    let mut rows = Vec::with_capacity(grid.len() * ns);
    for (gi, &t) in grid.iter().enumerate() {
        for (i, xs) in samples[gi].iter_mut().enumerate() {
            xs.sort_by(|a, b| a.total_cmp(b));
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            rows.push(BandRow { time: t, species: i, mean, lo95: quantile(xs, 0.025), hi95: quantile(xs, 0.975) });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lna::{FilterSetup, LikelihoodKind, LnaMoments};
    use crate::model::{catalog, ParamBinding, ParamSpec, ParameterSpace, Prior, Target};
    use crate::simulate::{simulate_dataset, InitialState, ObservationSchedule};

    fn lv_posterior(noise: f64) -> LnaPosterior {
        let net = catalog::lotka_volterra();
        let sched = ObservationSchedule::uniform(0.0, 2.0, 4, vec![0, 1]);
        let mut rng = RngStream::new(2, 0);
        let th = vec![0.5, 0.0025, 0.3];
        let (_, data) =
            simulate_dataset(&net, &InitialState::fixed(vec![71.0, 79.0]), &th, &sched, &[noise, noise], 1, &mut rng)
                .unwrap();
        LnaPosterior {
            net,
            space: ParameterSpace::new(vec![ParamSpec::new("theta1", Prior::Uniform { lo: 0.0, hi: 5.0 })]).unwrap(),
            binding: ParamBinding { rates: th, noise: vec![noise, noise], targets: vec![Target::Rate(0)] },
            data,
            setup: FilterSetup::new(LnaMoments::isotropic(vec![71.0, 79.0], 1.0)),
            kind: LikelihoodKind::Filter,
        }
    }

    #[test]
    fn exact_observation_collapses_band() {
        let post = lv_posterior(0.0);
        let mut rng = RngStream::new(0, 1);
        let rows = infer_trajectory(&post, &[vec![0.5]], 0, &post.data[0].times.clone(), 50, &mut rng).unwrap();
        for r in rows {
            let y = post.data[0].values[post.data[0].times.iter().position(|&t| t == r.time).unwrap()][r.species];
            assert!(r.hi95 - r.lo95 < 1e-6, "width {}", r.hi95 - r.lo95);
            assert!((r.mean - y).abs() < 1e-6);
        }
    }

    #[test]
    fn bands_widen_between_observations() {
        let post = lv_posterior(2.0);
        let mut rng = RngStream::new(0, 1);
        let rows = infer_trajectory(&post, &[vec![0.5]], 0, &[0.5, 0.75], 400, &mut rng).unwrap();
        let width = |t: f64| {
            let r = rows.iter().find(|r| r.time == t && r.species == 0).unwrap();
            r.hi95 - r.lo95
        };
        assert!(width(0.75) > width(0.5));
        for r in &rows {
            assert!(r.lo95 <= r.mean && r.mean <= r.hi95);
        }
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[0.0, 1.0, 2.0, 3.0, 4.0], 0.5), 2.0);
        assert!((quantile(&[0.0, 10.0], 0.025) - 0.25).abs() < 1e-12);
    }
}
