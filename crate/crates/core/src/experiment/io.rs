//! Writers for experiment artifacts. Everything except `timings.json` is
//! a pure function of the configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::runner::ExperimentOutput;
use crate::error::Result;
use crate::samplers::GaussianPosterior;

/// `replicate_id,sample_id,param,value` rows for every solved replication.
pub fn write_samples_csv(path: &Path, out: &ExperimentOutput) -> Result<()> {
    let names: Vec<&str> = out.config.parameters.iter().map(|p| p.name.as_str()).collect();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["replicate_id", "sample_id", "param", "value"])?;
    for rep in out.reps.iter().filter(|r| r.solved) {
        for (i, s) in rep.samples.iter().enumerate() {
            for (name, v) in names.iter().zip(s) {
                w.write_record([rep.rep.to_string(), i.to_string(), name.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct PosteriorRecord<'a> {
    replicate_id: usize,
    posterior: &'a GaussianPosterior,
}

#[derive(Serialize)]
struct Timing {
    replicate_id: usize,
    seconds: f64,
}

/// Writes `config.json`, `report.json`, `samples.csv`, `posteriors.json`
/// and `timings.json` into `dir`.
pub fn write_outputs(dir: &Path, out: &ExperimentOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files: Vec<PathBuf> =
        ["config.json", "report.json", "samples.csv", "posteriors.json", "timings.json"].iter().map(|f| dir.join(f)).collect();
    write_json(&files[0], &out.config)?;
    write_json(&files[1], &out.report)?;
    write_samples_csv(&files[2], out)?;
    let posts: Vec<PosteriorRecord> = out
        .reps
        .iter()
        .filter_map(|r| r.gaussian.as_ref().map(|g| PosteriorRecord { replicate_id: r.rep, posterior: g }))
        .collect();
    write_json(&files[3], &posts)?;
    let timings: Vec<Timing> = out.reps.iter().map(|r| Timing { replicate_id: r.rep, seconds: r.seconds }).collect();
    write_json(&files[4], &timings)?;
    Ok(files)
}
