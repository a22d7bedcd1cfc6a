use crate::model::ReactionNetwork;
use crate::numerics::mvn_logpdf;
use crate::simulate::ObservationSet;

/// Log-likelihood of exactly, fully observed paths under the one-step
/// Euler-Maruyama transition density
/// `N(s_h + C v(s_h) Δt, Ω⁻¹ C diag(v(s_h)) Cᵀ Δt)`.
/// Returns `-∞` on any failure, including partial observation.
pub fn euler_transition_loglik(net: &ReactionNetwork, theta: &[f64], data: &[ObservationSet]) -> f64 {
    let ns = net.num_species();
    let mut total = 0.0;
    for obs in data {
        if obs.observed.len() != ns || obs.observed.iter().enumerate().any(|(k, &i)| k != i) {
            return f64::NEG_INFINITY;
        }
        for h in 1..obs.len() {
            let dt = obs.times[h] - obs.times[h - 1];
            let s = &obs.values[h - 1];
            let drift = match net.drift(s, theta) {
                Ok(d) => d,
                Err(_) => return f64::NEG_INFINITY,
            };
            let mean: Vec<f64> = s.iter().zip(&drift).map(|(x, d)| x + d * dt).collect();
            let cov = match net.diffusion_matrix(s, theta) {
                Ok(c) => c * dt,
                Err(_) => return f64::NEG_INFINITY,
            };
            match mvn_logpdf(&obs.values[h], &mean, &cov) {
                Ok(l) => total += l,
                Err(_) => return f64::NEG_INFINITY,
            }
        }
    }
    if total.is_finite() {
        total
    } else {
        f64::NEG_INFINITY
    }
}
