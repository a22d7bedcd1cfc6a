use crate::error::{Error, Result};
use crate::model::ReactionNetwork;
use crate::numerics::{Matrix, Rk4};

/// RK4 substeps per propagation interval unless configured otherwise.
pub const DEFAULT_SUBSTEPS: usize = 50;

/// Mean and system-size-scaled covariance `Γ`; the state covariance is
/// `Γ / Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LnaMoments {
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

impl LnaMoments {
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "mean has {n} entries, covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        Ok(Self { mean, cov })
    }

    /// Mean `m` with covariance `var·I`.
    pub fn isotropic(mean: Vec<f64>, var: f64) -> Self {
        let n = mean.len();
        Self { mean, cov: Matrix::identity(n, n) * var }
    }
}

/// Reusable moment integrator bound to one network.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    net: &'a ReactionNetwork,
    substeps: usize,
    stoich: Vec<f64>,
    rk: Rk4,
    v: Vec<f64>,
    jac: Vec<f64>,
    f: Vec<f64>,
    y: Vec<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(net: &'a ReactionNetwork, substeps: usize) -> Self {
        let (ns, nr) = (net.num_species(), net.num_reactions());
        let stoich = (0..ns).flat_map(|i| (0..nr).map(move |r| (i, r))).map(|(i, r)| net.stoich(i, r)).collect();
        Self {
            net,
            substeps,
            stoich,
            rk: Rk4::new(ns + ns * ns),
            v: vec![0.0; nr],
            jac: vec![0.0; nr * ns],
            f: vec![0.0; ns * ns],
            y: vec![0.0; ns + ns * ns],
        }
    }

    pub fn network(&self) -> &ReactionNetwork {
        self.net
    }

    /// Integrates the mean and `Γ` equations from `t0` to `t1`.
    pub fn propagate(&mut self, m: &LnaMoments, theta: &[f64], t0: f64, t1: f64) -> Result<LnaMoments> {
        let ns = self.net.num_species();
        let nr = self.net.num_reactions();
        if m.mean.len() != ns {
            return Err(Error::DimensionMismatch(format!(
                "moments of dimension {} for {ns} species",
                m.mean.len()
            )));
        }
        if theta.len() != self.net.num_params {
            return Err(Error::DimensionMismatch(format!(
                "{} rate parameters, network expects {}",
                theta.len(),
                self.net.num_params
            )));
        }
        self.y[..ns].copy_from_slice(&m.mean);
        for i in 0..ns {
            for j in 0..ns {
                self.y[ns + i * ns + j] = m.cov[(i, j)];
            }
        }
        let Self { net, substeps, stoich, rk, v, jac, f, y } = self;
        let c = &stoich[..];
        let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
            let (mean, g) = y.split_at(ns);
            net.rates_into(mean, theta, v);
            net.rate_jacobian_into(mean, theta, jac);
            for i in 0..ns {
                let ci = &c[i * nr..(i + 1) * nr];
                dy[i] = ci.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for j in 0..ns {
                    f[i * ns + j] = (0..nr).map(|r| ci[r] * jac[r * ns + j]).sum();
                }
            }
            let dg = &mut dy[ns..];
            for i in 0..ns {
                for j in i..ns {
                    let mut acc = 0.0;
                    for k in 0..ns {
                        acc += g[i * ns + k] * f[j * ns + k] + f[i * ns + k] * g[k * ns + j];
                    }
                    for r in 0..nr {
                        acc += c[i * nr + r] * v[r] * c[j * nr + r];
                    }
                    dg[i * ns + j] = acc;
                    dg[j * ns + i] = acc;
                }
            }
        };
        let symmetrize = |y: &mut [f64]| {
            let g = &mut y[ns..];
            for i in 0..ns {
                for j in (i + 1)..ns {
                    let a = 0.5 * (g[i * ns + j] + g[j * ns + i]);
                    g[i * ns + j] = a;
                    g[j * ns + i] = a;
                }
            }
        };
        rk.integrate(field, y, t0, t1, *substeps, symmetrize)?;
        let mean = y[..ns].to_vec();
        let cov = Matrix::from_fn(ns, ns, |i, j| y[ns + i * ns + j]);
        Ok(LnaMoments { mean, cov })
    }
}

/// One-shot moment propagation; see [`Propagator`] for repeated use.
pub fn propagate(
    net: &ReactionNetwork,
    m: &LnaMoments,
    theta: &[f64],
    t0: f64,
    t1: f64,
    substeps: usize,
) -> Result<LnaMoments> {
    Propagator::new(net, substeps).propagate(m, theta, t0, t1)
}
