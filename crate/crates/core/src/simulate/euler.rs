use crate::error::{Error, Result};
use crate::model::ReactionNetwork;
use crate::numerics::{cholesky_psd, RngStream};

/// States above this magnitude abort an Euler-Maruyama run.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Euler-Maruyama for the diffusion approximation, one step between each
/// pair of consecutive `times`. Negative components are clamped to zero.
/// Returns the state at every entry of `times`, starting with `s0`.
pub fn euler_maruyama(
    net: &ReactionNetwork,
    s0: &[f64],
    theta: &[f64],
    times: &[f64],
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    euler_maruyama_scaled(net, s0, theta, times, 1.0, rng)
}

/// As [`euler_maruyama`] with the noise multiplied by `noise_scale`.
pub fn euler_maruyama_scaled(
    net: &ReactionNetwork,
    s0: &[f64],
    theta: &[f64],
    times: &[f64],
    noise_scale: f64,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    let ns = net.num_species();
    let mut s = s0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    if times.is_empty() {
        return Ok(out);
    }
    out.push(s.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let drift = net.drift(&s, theta)?;
        let mut next: Vec<f64> = (0..ns).map(|i| s[i] + drift[i] * dt).collect();
        if noise_scale != 0.0 {
            let (l, _) = cholesky_psd(&(net.diffusion_matrix(&s, theta)? * dt), 0.0)?;
            let z = rng.normals(ns);
            for i in 0..ns {
                next[i] += noise_scale * (0..=i).map(|k| l[(i, k)] * z[k]).sum::<f64>();
            }
        }
        for x in next.iter_mut() {
            if !x.is_finite() || x.abs() > DIVERGENCE_BOUND {
                return Err(Error::IntegrationDiverged(format!("state {x} at t = {}", w[1])));
            }
            *x = x.max(0.0);
        }
        s = next;
        out.push(s.clone());
    }
    Ok(out)
}
