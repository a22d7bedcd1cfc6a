use crate::error::{Error, Result};

/// Classical fourth-order Runge-Kutta with a fixed number of substeps.
///
/// Holds its stage buffers so repeated integrations of the same dimension
/// do not allocate.
#[derive(Debug, Clone, Default)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    fn resize(&mut self, dim: usize) {
        for b in [&mut self.k1, &mut self.k2, &mut self.k3, &mut self.k4, &mut self.tmp] {
            b.resize(dim, 0.0);
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` in place. `after_step`
    /// runs on the state after every substep.
    pub fn integrate<F, P>(
        &mut self,
        mut f: F,
        y: &mut [f64],
        t0: f64,
        t1: f64,
        substeps: usize,
        mut after_step: P,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        P: FnMut(&mut [f64]),
    {
        if substeps == 0 {
            return Err(Error::InvalidArgument("substeps must be >= 1".into()));
        }
        if !(t1 >= t0) {
            return Err(Error::InvalidArgument(format!(
                "integration interval reversed: [{t0}, {t1}]"
            )));
        }
        if t1 == t0 {
            return Ok(());
        }
        let n = y.len();
        self.resize(n);
        let h = (t1 - t0) / substeps as f64;
        for step in 0..substeps {
            let t = t0 + step as f64 * h;
            f(t, y, &mut self.k1);
            for i in 0..n {
                self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
            }
            f(t + 0.5 * h, &self.tmp, &mut self.k2);
            for i in 0..n {
                self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
            }
            f(t + 0.5 * h, &self.tmp, &mut self.k3);
            for i in 0..n {
                self.tmp[i] = y[i] + h * self.k3[i];
            }
            f(t + h, &self.tmp, &mut self.k4);
            for i in 0..n {
                y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
            }
            after_step(y);
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("RK4 state at t = {}", t + h)));
            }
        }
        Ok(())
    }
}

/// Convenience wrapper around [`Rk4::integrate`] returning the end state.
pub fn rk4_integrate<F>(f: F, y0: &[f64], t0: f64, t1: f64, substeps: usize) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut y = y0.to_vec();
    Rk4::new(y.len()).integrate(f, &mut y, t0, t1, substeps, |_| {})?;
    Ok(y)
}
