//! Numerical building blocks: fixed-step RK4, PSD Cholesky with a jitter
//! ladder, Gaussian densities, finite-difference derivatives and seeded
//! random streams.

mod diff;
mod linalg;
mod ode;
mod rng;

pub use diff::{grad_fd, grad_fd5, hess_fd, hess_fd_raw, DEFAULT_H_REL, DEFAULT_H_REL_HESS};
pub(crate) use linalg::chol_solve;
pub use linalg::{
    cholesky_pd, cholesky_psd, frobenius, max_eigenvalue, mvn_logpdf, mvn_sample, symmetrize,
};
pub use ode::{rk4_integrate, Rk4};
pub use rng::RngStream;

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;
