use super::{Matrix, RngStream, Vector};
use crate::error::{Error, Result};

/// Relative tolerance below which a Cholesky pivot counts as zero.
const PIVOT_TOL: f64 = 1e-11;

/// Replaces `a` by `(a + aᵀ) / 2`.
pub fn symmetrize(a: &mut Matrix) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
}

pub fn frobenius(a: &Matrix) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cholesky of `a + jitter·I`. With `strict`, every pivot must be positive;
/// otherwise pivots within tolerance of zero give a zero column.
fn try_cholesky(a: &Matrix, jitter: f64, strict: bool) -> Option<Matrix> {
    let n = a.nrows();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max).max(jitter);
    let tol = PIVOT_TOL * scale;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)] + jitter;
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !d.is_finite() {
            return None;
        }
        if d > tol || (strict && d > 0.0) {
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut r = a[(i, j)];
                for k in 0..j {
                    r -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = r / ljj;
            }
        } else if !strict && d >= -tol {
            for i in (j + 1)..n {
                let mut r = a[(i, j)];
                for k in 0..j {
                    r -= l[(i, k)] * l[(j, k)];
                }
                if r.abs() > tol {
                    return None;
                }
            }
        } else {
            return None;
        }
    }
    Some(l)
}

fn ladder(a: &Matrix, jitter_start: f64, strict: bool) -> Result<(Matrix, f64)> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cholesky of {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((Matrix::zeros(0, 0), 0.0));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix passed to cholesky".into()));
    }
    if let Some(l) = try_cholesky(a, 0.0, strict) {
        return Ok((l, 0.0));
    }
    let mean_diag = a.trace() / n as f64;
    let unit = if mean_diag > 0.0 { mean_diag } else { 1.0 };
    let max_jitter = 1e-4 * unit;
    let mut j = if jitter_start > 0.0 { jitter_start } else { 1e-12 * unit };
    while j <= max_jitter * (1.0 + 1e-12) {
        if let Some(l) = try_cholesky(a, j, strict) {
            return Ok((l, j));
        }
        j *= 10.0;
    }
    Err(Error::NotPsd(j / 10.0))
}

/// Lower-triangular `L` with `L Lᵀ = a + j I` for the smallest `j` on the
/// ladder `0, jitter_start, 10·jitter_start, …, 1e-4·trace(a)/dim`.
/// Rank-deficient PSD input is accepted with zero columns in `L`.
///
/// A non-positive `jitter_start` selects `1e-12·trace(a)/dim`.
pub fn cholesky_psd(a: &Matrix, jitter_start: f64) -> Result<(Matrix, f64)> {
    ladder(a, jitter_start, false)
}

/// As [`cholesky_psd`] but climbs the ladder until every pivot is positive.
pub fn cholesky_pd(a: &Matrix, jitter_start: f64) -> Result<(Matrix, f64)> {
    ladder(a, jitter_start, true)
}

/// Solves `L Lᵀ x = b` for lower-triangular `L` with positive diagonal.
pub(crate) fn chol_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= l[(i, k)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            z[i] -= l[(k, i)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    z
}

/// Log density of `N(mean, cov)` at `x`.
pub fn mvn_logpdf(x: &[f64], mean: &[f64], cov: &Matrix) -> Result<f64> {
    let n = x.len();
    if mean.len() != n || cov.nrows() != n || cov.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "mvn_logpdf: x {n}, mean {}, cov {}x{}",
            mean.len(),
            cov.nrows(),
            cov.ncols()
        )));
    }
    let (l, _) = cholesky_pd(cov, 0.0)?;
    let r: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let z = chol_solve(&l, &r);
    let quad: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let logdet: f64 = (0..n).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    Ok(-0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad))
}

/// One draw from `N(mean, cov)`.
pub fn mvn_sample(mean: &[f64], cov: &Matrix, rng: &mut RngStream) -> Result<Vector> {
    let n = mean.len();
    if cov.nrows() != n || cov.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "mvn_sample: mean {n}, cov {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let (l, _) = cholesky_psd(cov, 0.0)?;
    let z = Vector::from_vec(rng.normals(n));
    Ok(Vector::from_column_slice(mean) + l * z)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(a: &Matrix) -> f64 {
    if a.nrows() == 0 {
        return f64::NAN;
    }
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}
