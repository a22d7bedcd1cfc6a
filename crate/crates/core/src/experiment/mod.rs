//! Experiment configuration, presets, the replicated runner, metrics and
//! figure-data export.

mod config;
mod figures;
pub mod io;
mod metrics;
mod presets;
mod runner;

pub use config::{
    AbcSettings, ExperimentConfig, FilterInit, HOverride, ParamEntry, ScheduleConfig, SamplerKind, Truth,
    CONFIG_VERSION,
};
pub use figures::{diffusion_compare, emit_figure_data, DiffusionCompare, FigureKind};
pub use metrics::{rmse, MetricsReport, ParamSummary, Stat};
pub use presets::{preset, PRESET_NAMES};
pub use runner::{
    infer_replication, replicate_data, run_experiment, run_replications, run_target_sampler, summarize, ExperimentOutput,
    ReplicationResult, SamplerOutput,
};
