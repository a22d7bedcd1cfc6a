//! Exact (Gillespie) and diffusion (Euler-Maruyama) simulation, plus
//! noisy partial observation of simulated paths.

mod euler;
mod gillespie;
pub mod io;
mod observe;

pub use euler::{euler_maruyama, euler_maruyama_scaled, DIVERGENCE_BOUND};
pub use gillespie::{gillespie, Trajectory, DEFAULT_MAX_EVENTS};
pub use observe::{observe, simulate_dataset, InitialState, ObservationSchedule, ObservationSet};
