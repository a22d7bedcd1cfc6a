use super::{LnaMoments, Propagator, DEFAULT_SUBSTEPS};
use crate::error::{Error, Result};
use crate::model::ReactionNetwork;
use crate::numerics::{chol_solve, cholesky_pd, symmetrize, Matrix};
use crate::simulate::ObservationSet;

/// Linear-Gaussian measurement update of LNA moments.
///
/// With innovation `S = G Γ Gᵀ + Ω Σ`, returns the filtered moments
/// `α = s̄ + Γ Gᵀ S⁻¹ (y - G s̄)`, `β = Γ - Γ Gᵀ S⁻¹ G Γ` and the
/// predictive log density `log N(y; G s̄, S / Ω)`.
pub fn bayes_update(
    m: &LnaMoments,
    y: &[f64],
    g: &Matrix,
    sigma: &Matrix,
    omega: f64,
) -> Result<(LnaMoments, f64)> {
    let n = m.mean.len();
    let k = y.len();
    if g.nrows() != k || g.ncols() != n || sigma.nrows() != k || sigma.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "update with {k} observations, G {}x{}, Σ {}x{}, state {n}",
            g.nrows(),
            g.ncols(),
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let gamma_gt = &m.cov * g.transpose();
    let mut s = g * &gamma_gt + sigma * omega;
    symmetrize(&mut s);
    let (l, _) = cholesky_pd(&s, 0.0)?;
    let pred: Vec<f64> = (0..k).map(|i| (0..n).map(|j| g[(i, j)] * m.mean[j]).sum()).collect();
    let resid: Vec<f64> = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
    let w = chol_solve(&l, &resid);
    // Kᵀ = S⁻¹ G Γ, column by column.
    let mut kt = Matrix::zeros(k, n);
    for col in 0..n {
        let rhs: Vec<f64> = (0..k).map(|i| gamma_gt[(col, i)]).collect();
        let sol = chol_solve(&l, &rhs);
        for i in 0..k {
            kt[(i, col)] = sol[i];
        }
    }
    let mean: Vec<f64> = (0..n)
        .map(|j| m.mean[j] + (0..k).map(|i| gamma_gt[(j, i)] * w[i]).sum::<f64>())
        .collect();
    // Joseph form: algebraically Γ - Γ Gᵀ S⁻¹ G Γ, but stays PSD and
    // collapses cleanly to zero under exact observation.
    let gain = kt.transpose();
    let i_kg = Matrix::identity(n, n) - &gain * g;
    let mut cov = &i_kg * &m.cov * i_kg.transpose() + &gain * sigma * gain.transpose() * omega;
    symmetrize(&mut cov);
    let quad: f64 = resid.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() * omega;
    let logdet: f64 = 2.0 * (0..k).map(|i| l[(i, i)].ln()).sum::<f64>() - k as f64 * omega.ln();
    let ll = -0.5 * (k as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad);
    if !ll.is_finite() || mean.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("filter update".into()));
    }
    Ok((LnaMoments { mean, cov }, ll))
}

/// Initial LNA moments at time `t0` and the integrator resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSetup {
    pub init: LnaMoments,
    pub t0: f64,
    pub substeps: usize,
}

impl FilterSetup {
    pub fn new(init: LnaMoments) -> Self {
        Self { init, t0: 0.0, substeps: DEFAULT_SUBSTEPS }
    }
}

/// Moments around one observation time.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStep {
    pub time: f64,
    pub predicted: LnaMoments,
    pub updated: LnaMoments,
    pub loglik: f64,
}

/// Runs the alternating propagate / update recursion over one observed
/// trajectory. `noise_sd` holds one standard deviation per observed species.
pub fn filter(
    prop: &mut Propagator<'_>,
    theta: &[f64],
    noise_sd: &[f64],
    obs: &ObservationSet,
    setup: &FilterSetup,
) -> Result<Vec<FilterStep>> {
    let net = prop.network();
    let ns = net.num_species();
    let omega = net.system_size;
    if noise_sd.len() != obs.observed.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} noise levels for {} observed species",
            noise_sd.len(),
            obs.observed.len()
        )));
    }
    let mut g = Matrix::zeros(obs.observed.len(), ns);
    for (row, &i) in obs.observed.iter().enumerate() {
        if i >= ns {
            return Err(Error::DimensionMismatch(format!("observed species {i} of {ns}")));
        }
        g[(row, i)] = 1.0;
    }
    let sigma = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
        noise_sd.len(),
        noise_sd.iter().map(|s| s * s),
    ));
    let mut m = setup.init.clone();
    let mut t = setup.t0;
    let mut steps = Vec::with_capacity(obs.len());
    for (&th, y) in obs.times.iter().zip(&obs.values) {
        if th < t {
            return Err(Error::InvalidArgument(format!(
                "observation at {th} precedes current time {t}"
            )));
        }
        let predicted = if th > t { prop.propagate(&m, theta, t, th)? } else { m };
        let (updated, loglik) = bayes_update(&predicted, y, &g, &sigma, omega)?;
        steps.push(FilterStep { time: th, predicted, updated: updated.clone(), loglik });
        m = updated;
        t = th;
    }
    Ok(steps)
}

/// Filtering log-likelihood summed over independent trajectories.
/// Any numerical failure yields `-∞`.
pub fn log_likelihood(
    net: &ReactionNetwork,
    theta: &[f64],
    noise_sd: &[f64],
    data: &[ObservationSet],
    setup: &FilterSetup,
) -> f64 {
    let mut prop = Propagator::new(net, setup.substeps);
    let mut total = 0.0;
    for obs in data {
        match filter(&mut prop, theta, noise_sd, obs, setup) {
            Ok(steps) => total += steps.iter().map(|s| s.loglik).sum::<f64>(),
            Err(_) => return f64::NEG_INFINITY,
        }
    }
    if total.is_finite() {
        total
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::catalog;
    use crate::numerics::{mvn_logpdf, RngStream};
    use crate::simulate::{simulate_dataset, InitialState, ObservationSchedule};
    use proptest::prelude::*;

    fn scalar(v: f64) -> Matrix {
        Matrix::from_element(1, 1, v)
    }

    #[test]
    fn scalar_update() {
        let m = LnaMoments::new(vec![1.0], scalar(2.0)).unwrap();
        let (post, ll) = bayes_update(&m, &[3.0], &scalar(1.0), &scalar(1.0), 1.0).unwrap();
        assert!((post.mean[0] - 7.0 / 3.0).abs() < 1e-14);
        assert!((post.cov[(0, 0)] - 2.0 / 3.0).abs() < 1e-14);
        let expect = mvn_logpdf(&[3.0], &[1.0], &scalar(3.0)).unwrap();
        assert!((ll - expect).abs() < 1e-12);
    }

    #[test]
    fn uninformative_noise_leaves_moments() {
        let cov = Matrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let m = LnaMoments::new(vec![1.0, -1.0], cov).unwrap();
        let (post, _) = bayes_update(
            &m,
            &[5.0, 5.0],
            &Matrix::identity(2, 2),
            &(Matrix::identity(2, 2) * 1e12),
            1.0,
        )
        .unwrap();
        for i in 0..2 {
            assert!((post.mean[i] - m.mean[i]).abs() < 1e-6);
        }
        assert!((&post.cov - &m.cov).abs().max() < 1e-6);
    }

    #[test]
    fn exact_full_observation_pins_state() {
        let cov = Matrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let m = LnaMoments::new(vec![1.0, -1.0], cov).unwrap();
        let (post, _) =
            bayes_update(&m, &[4.0, 2.0], &Matrix::identity(2, 2), &Matrix::zeros(2, 2), 1.0).unwrap();
        assert!((post.mean[0] - 4.0).abs() < 1e-10 && (post.mean[1] - 2.0).abs() < 1e-10);
        assert!(post.cov.abs().max() < 1e-10);
    }

    #[test]
    fn system_size_scales_predictive_variance() {
        let m = LnaMoments::new(vec![0.0], scalar(2.0)).unwrap();
        let (_, ll) = bayes_update(&m, &[1.0], &scalar(1.0), &scalar(0.5), 4.0).unwrap();
        // Predictive variance Γ/Ω + Σ = 0.5 + 0.5.
        let expect = mvn_logpdf(&[1.0], &[0.0], &scalar(1.0)).unwrap();
        assert!((ll - expect).abs() < 1e-12);
    }

    fn enzyme_data(seed: u64, m: usize) -> (ReactionNetwork, Vec<ObservationSet>, FilterSetup) {
        let net = catalog::enzyme();
        let init = InitialState { mean: vec![50.0, 40.0, 60.0, 10.0], var: vec![1.0; 4], round: true };
        let sched = ObservationSchedule::uniform(0.0, 80.0, 8, vec![3]);
        let mut rng = RngStream::new(seed, 0);
        let (_, obs) =
            simulate_dataset(&net, &init, &[0.001, 0.005, 0.01], &sched, &[4.0], m, &mut rng).unwrap();
        let setup = FilterSetup::new(LnaMoments::isotropic(vec![50.0, 40.0, 60.0, 10.0], 1.0));
        (net, obs, setup)
    }

    #[test]
    fn likelihood_independent_of_trajectory_order() {
        let (net, mut obs, setup) = enzyme_data(3, 3);
        let th = [0.001, 0.005, 0.01];
        let a = log_likelihood(&net, &th, &[4.0], &obs, &setup);
        obs.reverse();
        let b = log_likelihood(&net, &th, &[4.0], &obs, &setup);
        assert!(a.is_finite());
        assert!((a - b).abs() <= 1e-10 * a.abs());
    }

    #[test]
    fn nonfinite_parameters_give_sentinel() {
        let (net, obs, setup) = enzyme_data(3, 1);
        let ll = log_likelihood(&net, &[0.001, 0.005, f64::NAN], &[4.0], &obs, &setup);
        assert_eq!(ll, f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn update_never_inflates_covariance(
            a in proptest::collection::vec(-2.0f64..2.0, 9),
            y in proptest::collection::vec(-5.0f64..5.0, 2),
            sd in 0.1f64..3.0,
        ) {
            let b = Matrix::from_row_slice(3, 3, &a);
            let cov = &b * b.transpose() + Matrix::identity(3, 3) * 0.1;
            let m = LnaMoments::new(vec![0.5, 1.0, -0.5], cov.clone()).unwrap();
            let g = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
            let (post, _) = bayes_update(&m, &y, &g, &(Matrix::identity(2, 2) * sd * sd), 1.0).unwrap();
            let diff = &cov - &post.cov;
            let ev = diff.symmetric_eigen().eigenvalues;
            prop_assert!(ev.iter().all(|&e| e >= -1e-9));
            prop_assert!((&post.cov - post.cov.transpose()).abs().max() <= 1e-10);
        }

        #[test]
        fn update_commutes_with_species_relabelling(
            a in proptest::collection::vec(-2.0f64..2.0, 9),
            y in -5.0f64..5.0,
        ) {
            let b = Matrix::from_row_slice(3, 3, &a);
            let cov = &b * b.transpose() + Matrix::identity(3, 3) * 0.1;
            let mean = vec![0.5, 1.0, -0.5];
            let perm = [2usize, 0, 1];
            let pmat = Matrix::from_fn(3, 3, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
            let g = Matrix::from_row_slice(1, 3, &[0.0, 1.0, 0.0]);
            let s = scalar(0.7);
            let (p1, l1) = bayes_update(&LnaMoments::new(mean.clone(), cov.clone()).unwrap(), &[y], &g, &s, 1.0).unwrap();
            let pm: Vec<f64> = perm.iter().map(|&j| mean[j]).collect();
            let pc = &pmat * &cov * pmat.transpose();
            let pg = &g * pmat.transpose();
            let (p2, l2) = bayes_update(&LnaMoments::new(pm, pc).unwrap(), &[y], &pg, &s, 1.0).unwrap();
            prop_assert!((l1 - l2).abs() < 1e-10);
            for (i, &j) in perm.iter().enumerate() {
                prop_assert!((p2.mean[i] - p1.mean[j]).abs() < 1e-10);
            }
            prop_assert!((&p2.cov - &pmat * &p1.cov * pmat.transpose()).abs().max() < 1e-10);
        }
    }
}
