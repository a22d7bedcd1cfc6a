use super::{symmetrize, Matrix};
use crate::error::{Error, Result};

/// Default relative step for gradients.
pub const DEFAULT_H_REL: f64 = 1e-5;
/// Default relative step for Hessians (second differences lose more digits).
pub const DEFAULT_H_REL_HESS: f64 = 1e-4;

fn step(theta: f64, h_rel: f64) -> f64 {
    h_rel * theta.abs().max(1.0)
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("objective {v} at {x:?}")))
    }
}

/// Central-difference gradient with `h_k = h_rel·max(1, |θ_k|)`.
pub fn grad_fd<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h_rel: f64) -> Result<Vec<f64>> {
    let mut x = theta.to_vec();
    let mut g = vec![0.0; theta.len()];
    for k in 0..theta.len() {
        let h = step(theta[k], h_rel);
        x[k] = theta[k] + h;
        let fp = eval(&mut f, &x)?;
        x[k] = theta[k] - h;
        let fm = eval(&mut f, &x)?;
        x[k] = theta[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Five-point stencil gradient, used to cross-check [`grad_fd`].
pub fn grad_fd5<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h_rel: f64) -> Result<Vec<f64>> {
    let mut x = theta.to_vec();
    let mut g = vec![0.0; theta.len()];
    for k in 0..theta.len() {
        let h = step(theta[k], h_rel);
        let mut at = |d: f64, x: &mut Vec<f64>| {
            x[k] = theta[k] + d;
            let v = eval(&mut f, x);
            x[k] = theta[k];
            v
        };
        let f2 = at(2.0 * h, &mut x)?;
        let f1 = at(h, &mut x)?;
        let m1 = at(-h, &mut x)?;
        let m2 = at(-2.0 * h, &mut x)?;
        g[k] = (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * h);
    }
    Ok(g)
}

/// Hessian by central second differences, every entry computed on its own.
/// The result is symmetric up to rounding but not symmetrized.
pub fn hess_fd_raw<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], h_rel: f64) -> Result<Matrix> {
    let n = theta.len();
    let h: Vec<f64> = theta.iter().map(|&t| step(t, h_rel)).collect();
    let mut x = theta.to_vec();
    let f0 = eval(&mut f, &x)?;
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        x[i] = theta[i] + h[i];
        let fp = eval(&mut f, &x)?;
        x[i] = theta[i] - h[i];
        let fm = eval(&mut f, &x)?;
        x[i] = theta[i];
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut corner = |si: f64, sj: f64, x: &mut Vec<f64>| {
                x[i] = theta[i] + si * h[i];
                x[j] = theta[j] + sj * h[j];
                let v = eval(&mut f, x);
                x[i] = theta[i];
                x[j] = theta[j];
                v
            };
            let pp = corner(1.0, 1.0, &mut x)?;
            let pm = corner(1.0, -1.0, &mut x)?;
            let mp = corner(-1.0, 1.0, &mut x)?;
            let mm = corner(-1.0, -1.0, &mut x)?;
            out[(i, j)] = ((pp + mm) - (pm + mp)) / (4.0 * h[i] * h[j]);
        }
    }
    Ok(out)
}

/// Symmetrized finite-difference Hessian.
pub fn hess_fd<F: FnMut(&[f64]) -> f64>(f: F, theta: &[f64], h_rel: f64) -> Result<Matrix> {
    let mut h = hess_fd_raw(f, theta, h_rel)?;
    symmetrize(&mut h);
    Ok(h)
}
