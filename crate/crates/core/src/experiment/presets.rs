use super::ExperimentConfig;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 3] = ["enzyme", "lotka", "genenet"];

/// Built-in configuration for one of the benchmark cases.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = match name {
        "enzyme" => include_str!("../../presets/enzyme.json"),
        "lotka" => include_str!("../../presets/lotka.json"),
        "genenet" => include_str!("../../presets/genenet.json"),
        other => return Err(Error::Config(format!("unknown case '{other}'"))),
    };
    ExperimentConfig::from_json(text)
}
