use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Rate law of a single reaction, `v_r(s; θ)`. Parameter and species
/// fields index into the network's parameter and species vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RateLaw {
    /// `θ_p · Π s_i^m_i` over `(species, multiplicity)` pairs.
    MassAction { param: usize, reactants: Vec<(usize, u32)> },
    /// `0.5 · θ_p · s (s - 1)` for a homodimerization, zero when `s < 1`.
    Combinatorial { param: usize, species: usize },
    /// `θ_p · (total - s)`, zero when `s > total`.
    ConservedComplement { param: usize, species: usize, total: f64 },
    /// `V · Π s_i / (K_i + s_i)` with `V = θ_vmax` and `K_i = θ_km`.
    MichaelisMenten { vmax: usize, factors: Vec<(usize, usize)> },
}

impl RateLaw {
    pub fn rate(&self, s: &[f64], theta: &[f64]) -> f64 {
        match self {
            RateLaw::MassAction { param, reactants } => {
                let mut v = theta[*param];
                for &(i, m) in reactants {
                    v *= s[i].powi(m as i32);
                }
                v
            }
            RateLaw::Combinatorial { param, species } => {
                let x = s[*species];
                if x < 1.0 {
                    0.0
                } else {
                    0.5 * theta[*param] * x * (x - 1.0)
                }
            }
            RateLaw::ConservedComplement { param, species, total } => {
                theta[*param] * (total - s[*species]).max(0.0)
            }
            RateLaw::MichaelisMenten { vmax, factors } => {
                let mut v = theta[*vmax];
                for &(i, k) in factors {
                    v *= s[i] / (theta[k] + s[i]);
                }
                v
            }
        }
    }

    /// Adds `∂v/∂s` into `row` (length = number of species).
    pub fn rate_gradient(&self, s: &[f64], theta: &[f64], row: &mut [f64]) {
        match self {
            RateLaw::MassAction { param, reactants } => {
                for (a, &(i, m)) in reactants.iter().enumerate() {
                    if m == 0 {
                        continue;
                    }
                    let mut d = theta[*param] * m as f64 * s[i].powi(m as i32 - 1);
                    for (b, &(j, mj)) in reactants.iter().enumerate() {
                        if a != b {
                            d *= s[j].powi(mj as i32);
                        }
                    }
                    row[i] += d;
                }
            }
            RateLaw::Combinatorial { param, species } => {
                let x = s[*species];
                if x >= 1.0 {
                    row[*species] += 0.5 * theta[*param] * (2.0 * x - 1.0);
                }
            }
            RateLaw::ConservedComplement { param, species, total } => {
                if s[*species] < *total {
                    row[*species] -= theta[*param];
                }
            }
            RateLaw::MichaelisMenten { vmax, factors } => {
                for (a, &(i, k)) in factors.iter().enumerate() {
                    let km = theta[k];
                    let mut d = theta[*vmax] * km / (km + s[i]).powi(2);
                    for (b, &(j, kj)) in factors.iter().enumerate() {
                        if a != b {
                            d *= s[j] / (theta[kj] + s[j]);
                        }
                    }
                    row[i] += d;
                }
            }
        }
    }

    fn params(&self) -> Vec<usize> {
        match self {
            RateLaw::MassAction { param, .. }
            | RateLaw::Combinatorial { param, .. }
            | RateLaw::ConservedComplement { param, .. } => vec![*param],
            RateLaw::MichaelisMenten { vmax, factors } => {
                std::iter::once(*vmax).chain(factors.iter().map(|f| f.1)).collect()
            }
        }
    }

    fn species(&self) -> Vec<usize> {
        match self {
            RateLaw::MassAction { reactants, .. } => reactants.iter().map(|r| r.0).collect(),
            RateLaw::Combinatorial { species, .. } | RateLaw::ConservedComplement { species, .. } => {
                vec![*species]
            }
            RateLaw::MichaelisMenten { factors, .. } => factors.iter().map(|f| f.0).collect(),
        }
    }
}

fn default_system_size() -> f64 {
    1.0
}

/// Stoichiometry plus rate laws. `stoichiometry[i][r]` is the net change
/// of species `i` when reaction `r` fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    pub species: Vec<String>,
    pub stoichiometry: Vec<Vec<i64>>,
    pub rate_laws: Vec<RateLaw>,
    pub num_params: usize,
    #[serde(default = "default_system_size")]
    pub system_size: f64,
}

impl ReactionNetwork {
    pub fn new(
        species: Vec<String>,
        stoichiometry: Vec<Vec<i64>>,
        rate_laws: Vec<RateLaw>,
        num_params: usize,
        system_size: f64,
    ) -> Result<Self> {
        let net = Self { species, stoichiometry, rate_laws, num_params, system_size };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        let ns = self.species.len();
        let nr = self.rate_laws.len();
        if ns == 0 || nr == 0 {
            return Err(Error::InvalidNetwork("network needs species and reactions".into()));
        }
        if self.stoichiometry.len() != ns || self.stoichiometry.iter().any(|row| row.len() != nr) {
            return Err(Error::InvalidNetwork(format!(
                "stoichiometry must be {ns}x{nr}"
            )));
        }
        if !(self.system_size > 0.0) {
            return Err(Error::InvalidNetwork("system size must be positive".into()));
        }
        for (r, law) in self.rate_laws.iter().enumerate() {
            if let Some(p) = law.params().into_iter().find(|&p| p >= self.num_params) {
                return Err(Error::InvalidNetwork(format!(
                    "reaction {r} references parameter {p} of {}",
                    self.num_params
                )));
            }
            if let Some(i) = law.species().into_iter().find(|&i| i >= ns) {
                return Err(Error::InvalidNetwork(format!(
                    "reaction {r} references species {i} of {ns}"
                )));
            }
        }
        Ok(())
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.rate_laws.len()
    }

    #[inline]
    pub fn stoich(&self, species: usize, reaction: usize) -> f64 {
        self.stoichiometry[species][reaction] as f64
    }

    fn check(&self, s: &[f64], theta: &[f64]) -> Result<()> {
        if s.len() != self.num_species() {
            return Err(Error::DimensionMismatch(format!(
                "state has {} entries, network has {} species",
                s.len(),
                self.num_species()
            )));
        }
        if theta.len() != self.num_params {
            return Err(Error::DimensionMismatch(format!(
                "parameter vector has {} entries, network expects {}",
                theta.len(),
                self.num_params
            )));
        }
        Ok(())
    }

    /// Rates without dimension checks; `out` has one slot per reaction.
    #[inline]
    pub fn rates_into(&self, s: &[f64], theta: &[f64], out: &mut [f64]) {
        for (o, law) in out.iter_mut().zip(&self.rate_laws) {
            *o = law.rate(s, theta);
        }
    }

    /// `∂v/∂s` without dimension checks, row-major `N_r × N_s` in `out`.
    #[inline]
    pub fn rate_jacobian_into(&self, s: &[f64], theta: &[f64], out: &mut [f64]) {
        let ns = self.num_species();
        out.iter_mut().for_each(|x| *x = 0.0);
        for (r, law) in self.rate_laws.iter().enumerate() {
            law.rate_gradient(s, theta, &mut out[r * ns..(r + 1) * ns]);
        }
    }

    pub fn eval_rates(&self, s: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        self.check(s, theta)?;
        let mut v = vec![0.0; self.num_reactions()];
        self.rates_into(s, theta, &mut v);
        Ok(v)
    }

    /// Propensities `Ω · v(s; θ)`.
    pub fn propensities(&self, s: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        let mut v = self.eval_rates(s, theta)?;
        v.iter_mut().for_each(|x| *x *= self.system_size);
        Ok(v)
    }

    /// Deterministic drift `C v(s; θ)`.
    pub fn drift(&self, s: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        let v = self.eval_rates(s, theta)?;
        Ok((0..self.num_species())
            .map(|i| (0..self.num_reactions()).map(|r| self.stoich(i, r) * v[r]).sum())
            .collect())
    }

    /// `Ω⁻¹ C diag(v) Cᵀ`.
    pub fn diffusion_matrix(&self, s: &[f64], theta: &[f64]) -> Result<Matrix> {
        let v = self.eval_rates(s, theta)?;
        let ns = self.num_species();
        let mut d = Matrix::zeros(ns, ns);
        for i in 0..ns {
            for j in 0..ns {
                d[(i, j)] = (0..self.num_reactions())
                    .map(|r| self.stoich(i, r) * v[r] * self.stoich(j, r))
                    .sum::<f64>()
                    / self.system_size;
            }
        }
        Ok(d)
    }

    /// `∂v/∂s`, an `N_r × N_s` matrix.
    pub fn rate_state_jacobian(&self, s: &[f64], theta: &[f64]) -> Result<Matrix> {
        self.check(s, theta)?;
        let mut buf = vec![0.0; self.num_reactions() * self.num_species()];
        self.rate_jacobian_into(s, theta, &mut buf);
        Ok(Matrix::from_row_slice(self.num_reactions(), self.num_species(), &buf))
    }

    /// Jacobian of the drift, `C ∂v/∂s`.
    pub fn drift_jacobian(&self, s: &[f64], theta: &[f64]) -> Result<Matrix> {
        let j = self.rate_state_jacobian(s, theta)?;
        Ok(self.stoich_matrix() * j)
    }

    pub fn stoich_matrix(&self) -> Matrix {
        Matrix::from_fn(self.num_species(), self.num_reactions(), |i, r| self.stoich(i, r))
    }
}
