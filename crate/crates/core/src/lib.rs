//! Stochastic reaction networks: exact and approximate simulation, a
//! linear-noise filtering likelihood, and Langevin / Gaussian-approximation
//! posterior samplers with ABC baselines.
//!
//! Shared types are re-exported at the crate root so the CLI and benches
//! can depend on a flat namespace.

pub mod error;
pub mod experiment;
pub mod lna;
pub mod model;
pub mod numerics;
pub mod samplers;
pub mod simulate;

pub use error::{Error, Result};
pub use experiment::{
    emit_figure_data, preset, run_experiment, ExperimentConfig, FigureKind, MetricsReport, SamplerKind,
};
pub use lna::{bayes_update, log_likelihood, propagate, LnaMoments, LnaPosterior};
pub use model::{ParameterSpace, Prior, RateLaw, ReactionNetwork, Transform};
pub use numerics::{Matrix, RngStream, Vector};
pub use samplers::{GaussianPosterior, LogDensity, SamplerConfig};
pub use simulate::{ObservationSchedule, ObservationSet, Trajectory};
