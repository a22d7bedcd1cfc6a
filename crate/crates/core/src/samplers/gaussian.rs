use serde::{Deserialize, Serialize};

use super::{norm, LogDensity, SamplerConfig};
use crate::error::{Error, Result};
use crate::numerics::{frobenius, max_eigenvalue, mvn_sample, symmetrize, Matrix, RngStream};

/// Covariance norm beyond which the recursion is treated as divergent.
const PSI_BLOWUP: f64 = 1e8;

/// Gaussian approximation `N(mode, covariance)` on the unconstrained scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPosterior {
    pub mode: Vec<f64>,
    /// Row-major covariance.
    pub covariance: Vec<Vec<f64>>,
    pub lambda_max: f64,
    /// Mean-recursion iterations.
    pub n1: usize,
    /// Covariance-recursion iterations (of the final, accepted run).
    pub n2: usize,
    pub converged: bool,
    pub hessian_evals: usize,
    /// `Δτ` of the mean recursion.
    pub step: f64,
    /// `Δτ` the covariance recursion finished with.
    pub cov_step: f64,
}

impl GaussianPosterior {
    fn build(mode: Vec<f64>, psi: &Matrix, n1: usize, n2: usize, converged: bool, hessian_evals: usize, step: f64, cov_step: f64) -> Self {
        let covariance = (0..psi.nrows()).map(|i| (0..psi.ncols()).map(|j| psi[(i, j)]).collect()).collect();
        Self { mode, covariance, lambda_max: max_eigenvalue(psi), n1, n2, converged, hessian_evals, step, cov_step }
    }

    pub fn cov_matrix(&self) -> Matrix {
        let n = self.mode.len();
        Matrix::from_fn(n, n, |i, j| self.covariance[i][j])
    }
}

/// `(Ψ Hᵀ + H Ψ + 2I) Δτ`.
fn cov_increment(psi: &Matrix, h: &Matrix, dt: f64) -> Matrix {
    let n = psi.nrows();
    (psi * h.transpose() + h * psi + Matrix::identity(n, n) * 2.0) * dt
}

/// One gradient-ascent step `θ̄ + ∇ Δτ`, halving the increment while the
/// gradient at the candidate is non-finite. Returns the new point, its
/// gradient, and whether the full step was taken.
fn ascend<T: LogDensity + ?Sized>(
    target: &T,
    theta: &[f64],
    grad: &[f64],
    dt: f64,
    max_halvings: usize,
) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let mut scale = 1.0;
    for _ in 0..=max_halvings {
        let cand: Vec<f64> = theta.iter().zip(grad).map(|(t, g)| t + g * dt * scale).collect();
        if cand.iter().all(|x| x.is_finite()) {
            if let Ok(g) = target.gradient(&cand) {
                return Ok((cand, g, scale == 1.0));
            }
        }
        scale *= 0.5;
    }
    Err(Error::Diverged("mean recursion left the support".into()))
}

/// Two-stage scheme: iterate the mean to a fixed point, evaluate the
/// Hessian once there, then iterate the covariance recursion with that
/// Hessian frozen.
///
/// If `‖ΔΨ‖_F` grows for `growth_window` consecutive iterations (or `Ψ`
/// blows up), the covariance step is halved and stage two restarts.
pub fn two_stage<T: LogDensity + ?Sized>(target: &T, cfg: &SamplerConfig, init: &[f64]) -> Result<GaussianPosterior> {
    let d = target.dim();
    let dt = cfg.step_size(d);
    let mut theta = init.to_vec();
    let mut grad = target.gradient(&theta).map_err(|e| Error::Diverged(format!("initial gradient: {e}")))?;
    let mut n1 = 0;
    let mut mean_converged = false;
    while n1 < cfg.max_iter {
        let (next, g, full) = ascend(target, &theta, &grad, dt, cfg.max_halvings)?;
        let moved = norm(&next.iter().zip(&theta).map(|(a, b)| a - b).collect::<Vec<_>>());
        theta = next;
        grad = g;
        n1 += 1;
        if full && moved <= cfg.eps_mean {
            mean_converged = true;
            break;
        }
    }
    let h = target.hessian(&theta).map_err(|e| Error::Diverged(format!("Hessian at mode: {e}")))?;
    let (psi, n2, cov_converged, cov_dt) = stage_two(&h, cfg, dt)?;
    Ok(GaussianPosterior::build(theta, &psi, n1, n2, mean_converged && cov_converged, 1, dt, cov_dt))
}

fn stage_two(h: &Matrix, cfg: &SamplerConfig, dt: f64) -> Result<(Matrix, usize, bool, f64)> {
    let n = h.nrows();
    let psi0 = Matrix::identity(n, n) * cfg.cov_init;
    let mut cov_dt = dt;
    for _ in 0..=cfg.max_halvings {
        let mut psi = psi0.clone();
        let mut prev = f64::INFINITY;
        let mut growth = 0;
        let mut unstable = false;
        for k in 1..=cfg.max_iter {
            let inc = cov_increment(&psi, h, cov_dt);
            psi += &inc;
            symmetrize(&mut psi);
            let size = frobenius(&inc);
            if !size.is_finite() || frobenius(&psi) > PSI_BLOWUP {
                unstable = true;
                break;
            }
            if size <= cfg.eps_cov {
                return Ok((psi, k, true, cov_dt));
            }
            growth = if size > prev { growth + 1 } else { 0 };
            prev = size;
            if growth >= cfg.growth_window {
                unstable = true;
                break;
            }
        }
        if !unstable {
            return Ok((psi, cfg.max_iter, false, cov_dt));
        }
        cov_dt *= 0.5;
    }
    Err(Error::Diverged("covariance recursion unstable at every step size".into()))
}

/// One-stage scheme: mean and covariance recursions advance together, with
/// a fresh Hessian at every iteration. Stops once both increments are
/// below tolerance.
pub fn one_stage<T: LogDensity + ?Sized>(target: &T, cfg: &SamplerConfig, init: &[f64]) -> Result<GaussianPosterior> {
    let d = target.dim();
    let dt = cfg.step_size(d);
    let psi0 = Matrix::identity(d, d) * cfg.cov_init;
    let mut psi = psi0.clone();
    let mut cov_dt = dt;
    let mut halvings = 0;
    let mut theta = init.to_vec();
    let mut grad = target.gradient(&theta).map_err(|e| Error::Diverged(format!("initial gradient: {e}")))?;
    let mut n = 0;
    let mut hess_evals = 0;
    let mut converged = false;
    while n < cfg.max_iter {
        let h = target.hessian(&theta).map_err(|e| Error::Diverged(format!("Hessian: {e}")))?;
        hess_evals += 1;
        let inc = cov_increment(&psi, &h, cov_dt);
        let (next, g, full) = ascend(target, &theta, &grad, dt, cfg.max_halvings)?;
        let moved = norm(&next.iter().zip(&theta).map(|(a, b)| a - b).collect::<Vec<_>>());
        theta = next;
        grad = g;
        psi += &inc;
        symmetrize(&mut psi);
        n += 1;
        let size = frobenius(&inc);
        if !size.is_finite() || frobenius(&psi) > PSI_BLOWUP {
            halvings += 1;
            if halvings > cfg.max_halvings {
                return Err(Error::Diverged("covariance recursion unstable".into()));
            }
            cov_dt *= 0.5;
            psi = psi0.clone();
            continue;
        }
        if full && moved <= cfg.eps_mean && size <= cfg.eps_cov {
            converged = true;
            break;
        }
    }
    Ok(GaussianPosterior::build(theta, &psi, n, n, converged, hess_evals, dt, cov_dt))
}

/// `count` independent draws from the Gaussian approximation.
pub fn sample_gaussian_posterior(gp: &GaussianPosterior, count: usize, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    let cov = gp.cov_matrix();
    (0..count)
        .map(|_| mvn_sample(&gp.mode, &cov, rng).map(|v| v.as_slice().to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `log p(θ) = -½ (θ-μ)ᵀ A (θ-μ)` with analytic derivatives.
    struct Quadratic {
        a: Matrix,
        mu: Vec<f64>,
    }

    impl LogDensity for Quadratic {
        fn dim(&self) -> usize {
            self.mu.len()
        }
        fn log_density(&self, x: &[f64]) -> f64 {
            let r = nalgebra::DVector::from_iterator(x.len(), x.iter().zip(&self.mu).map(|(a, b)| a - b));
            -0.5 * r.dot(&(&self.a * &r))
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            let r = nalgebra::DVector::from_iterator(x.len(), x.iter().zip(&self.mu).map(|(a, b)| a - b));
            Ok((-(&self.a * r)).as_slice().to_vec())
        }
        fn hessian(&self, _x: &[f64]) -> Result<Matrix> {
            Ok(-self.a.clone())
        }
    }

    fn diag_target() -> Quadratic {
        Quadratic { a: Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0])), mu: vec![1.0, -1.0] }
    }

    fn tight() -> SamplerConfig {
        SamplerConfig { step: Some(0.1), eps_mean: 1e-12, eps_cov: 1e-12, ..Default::default() }
    }

    #[test]
    fn two_stage_recovers_quadratic() {
        let gp = two_stage(&diag_target(), &tight(), &[0.0, 0.0]).unwrap();
        assert!(gp.converged);
        assert!((gp.mode[0] - 1.0).abs() < 1e-9 && (gp.mode[1] + 1.0).abs() < 1e-9);
        let cov = gp.cov_matrix();
        assert!((cov[(0, 0)] - 0.5).abs() < 1e-9 && (cov[(1, 1)] - 0.25).abs() < 1e-9);
        assert!(cov[(0, 1)].abs() < 1e-9);
        assert!((gp.lambda_max - 0.5).abs() < 1e-9);
        assert_eq!(gp.hessian_evals, 1);
    }

    #[test]
    fn one_stage_recovers_quadratic() {
        let gp = one_stage(&diag_target(), &tight(), &[0.0, 0.0]).unwrap();
        assert!(gp.converged);
        assert!((gp.mode[0] - 1.0).abs() < 1e-9 && (gp.mode[1] + 1.0).abs() < 1e-9);
        assert!((gp.cov_matrix() - Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.25]))).abs().max() < 1e-9);
        assert_eq!(gp.hessian_evals, gp.n1);
    }

    #[test]
    fn covariance_recursion_converges_to_identity() {
        let h = -Matrix::identity(3, 3);
        for dt in [0.05, 0.5, 0.95] {
            let cfg = SamplerConfig { eps_cov: 1e-12, ..Default::default() };
            let (psi, _, ok, used) = stage_two(&h, &SamplerConfig { cov_init: 3.0, ..cfg }, dt).unwrap();
            assert!(ok && used == dt);
            assert!((psi - Matrix::identity(3, 3)).abs().max() < 1e-10);
        }
    }

    #[test]
    fn unstable_covariance_step_is_halved() {
        let target = Quadratic { a: Matrix::identity(2, 2) * 40.0, mu: vec![0.0, 0.0] };
        let cfg = SamplerConfig { step: Some(0.03), eps_mean: 1e-10, eps_cov: 1e-12, ..Default::default() };
        let gp = two_stage(&target, &cfg, &[0.1, 0.1]).unwrap();
        assert!(gp.cov_step < gp.step);
        assert!((gp.cov_matrix() - Matrix::identity(2, 2) / 40.0).abs().max() < 1e-9);
    }

    #[test]
    fn fixed_point_gradient_is_small() {
        let target = diag_target();
        let cfg = SamplerConfig { step: Some(0.05), ..Default::default() };
        let gp = two_stage(&target, &cfg, &[3.0, 2.0]).unwrap();
        let g = target.gradient(&gp.mode).unwrap();
        assert!(norm(&g) <= 10.0 * cfg.eps_mean / 0.05);
    }

    #[test]
    fn saddle_fails() {
        let target = Quadratic { a: Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0])), mu: vec![0.0, 0.0] };
        let cfg = SamplerConfig { step: Some(0.1), max_iter: 2000, max_halvings: 3, ..Default::default() };
        assert!(two_stage(&target, &cfg, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn gaussian_draws_have_right_moments() {
        let gp = two_stage(&diag_target(), &tight(), &[0.0, 0.0]).unwrap();
        let mut rng = RngStream::new(4, 0);
        let xs = sample_gaussian_posterior(&gp, 50_000, &mut rng).unwrap();
        let m0 = xs.iter().map(|x| x[0]).sum::<f64>() / xs.len() as f64;
        let v1 = xs.iter().map(|x| (x[1] + 1.0).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((m0 - 1.0).abs() < 0.01);
        assert!((v1 - 0.25).abs() < 0.01);
    }
}
