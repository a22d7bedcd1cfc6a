use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SamplerKind};
use super::io::{write_json, write_samples_csv};
use super::runner::{run_experiment, run_target_sampler};
use crate::error::{Error, Result};
use crate::lna::infer_trajectory;
use crate::model::ReactionNetwork;
use crate::numerics::RngStream;
use crate::simulate::io::write_observations_csv;
use crate::simulate::{euler_maruyama, gillespie, simulate_dataset, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureKind {
    DiffusionCompare,
    TrajectoryBands,
    Violin,
}

impl FigureKind {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Config(format!("unknown figure kind '{s}'")))
    }
}

/// One exact path against averaged Euler-Maruyama transitions at several
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionCompare {
    pub exact: Trajectory,
    pub dts: Vec<f64>,
    /// Per step size: grid times and, at each time, the mean of the
    /// one-step draws.
    pub em_means: Vec<(Vec<f64>, Vec<Vec<f64>>)>,
    /// Per step size: mean absolute deviation between the averaged draws
    /// and the exact path, over grid times and species.
    pub mad: Vec<f64>,
}

/// Simulates one exact path on `[0, t_end]` from `s0`. For each step in
/// `dts`, every grid time `t_h` gets `paths` Euler-Maruyama draws started
/// from the exact state at `t_{h-1}`, which is how the transition density
/// approximates the jump process.
pub fn diffusion_compare(
    net: &ReactionNetwork,
    theta: &[f64],
    s0: &[f64],
    t_end: f64,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<DiffusionCompare> {
    let exact = gillespie(net, s0, theta, t_end, &mut RngStream::new(seed, 0))?;
    let ns = net.num_species();
    let mut em_means = Vec::with_capacity(dts.len());
    let mut mad = Vec::with_capacity(dts.len());
    for (k, &dt) in dts.iter().enumerate() {
        let steps = (t_end / dt).round() as usize;
        let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
        let mut rng = RngStream::new(seed, 1 + k as u64);
        let mut mean = vec![vec![0.0; ns]; times.len()];
        mean[0] = exact.state_at(0.0).to_vec();
        for h in 1..times.len() {
            let from = exact.state_at(times[h - 1]).to_vec();
            for _ in 0..paths {
                let step = euler_maruyama(net, &from, theta, &times[h - 1..=h], &mut rng)?;
                for i in 0..ns {
                    mean[h][i] += step[1][i] / paths as f64;
                }
            }
        }
        let dev: f64 = times
            .iter()
            .zip(&mean)
            .map(|(&t, m)| exact.state_at(t).iter().zip(m).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .sum::<f64>()
            / (times.len() * ns) as f64;
        mad.push(dev);
        em_means.push((times, mean));
    }
    Ok(DiffusionCompare { exact, dts: dts.to_vec(), em_means, mad })
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MadRow {
    dt: f64,
    mean_abs_deviation: f64,
}

/// Writes the data behind one figure into `dir` and returns the files.
///
/// * `diffusion-compare` uses the configured network, truth and initial
///   mean over `[0, 30]` with steps 2, 1, 0.5 and 0.1 and 100 paths.
/// * `trajectory-bands` fits replication 0 and writes 95% bands of the
///   hidden path alongside the true path and the observations.
/// * `violin` runs the experiment and writes natural-log posterior draws.
pub fn emit_figure_data(kind: FigureKind, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let net = &cfg.network;
    match kind {
        FigureKind::DiffusionCompare => {
            let dts = [2.0, 1.0, 0.5, 0.1];
            let s0 = cfg.initial_state.mean.clone();
            let cmp = diffusion_compare(net, &cfg.truth.rates, &s0, 30.0, &dts, 100, cfg.seed)?;
            let exact_path = dir.join("exact_path.csv");
            let fine: Vec<f64> = (0..=3000).map(|i| i as f64 * 0.01).collect();
            write_rows(
                &exact_path,
                &["time", "species", "value"],
                fine.iter().flat_map(|&t| {
                    let s = cmp.exact.state_at(t).to_vec();
                    net.species.iter().zip(s).map(move |(n, x)| vec![t.to_string(), n.clone(), x.to_string()]).collect::<Vec<_>>()
                }),
            )?;
            let em_path = dir.join("em_means.csv");
            write_rows(
                &em_path,
                &["dt", "time", "species", "value"],
                cmp.dts.iter().zip(&cmp.em_means).flat_map(|(&dt, (times, means))| {
                    times
                        .iter()
                        .zip(means)
                        .flat_map(|(&t, m)| {
                            net.species
                                .iter()
                                .zip(m)
                                .map(|(n, x)| vec![dt.to_string(), t.to_string(), n.clone(), x.to_string()])
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                }),
            )?;
            let mad_path = dir.join("deviation.json");
            let rows: Vec<MadRow> =
                cmp.dts.iter().zip(&cmp.mad).map(|(&dt, &m)| MadRow { dt, mean_abs_deviation: m }).collect();
            write_json(&mad_path, &rows)?;
            Ok(vec![exact_path, em_path, mad_path])
        }
        FigureKind::TrajectoryBands => {
            let mut data_rng = RngStream::new(cfg.seed, 0);
            let (trajs, data) = simulate_dataset(
                net,
                &cfg.initial_state,
                &cfg.truth.rates,
                &cfg.schedule.schedule(),
                &cfg.truth.noise,
                cfg.trajectories,
                &mut data_rng,
            )?;
            let post = cfg.posterior(data)?;
            let kind = if cfg.sampler.is_abc() { SamplerKind::TwoStage } else { cfg.sampler };
            let mut rng = RngStream::new(cfg.seed, 1);
            let out = run_target_sampler(&post, kind, &cfg.tuning, &mut rng)?;
            let thetas: Vec<Vec<f64>> = out.samples.iter().map(|p| post.space.to_constrained(p)).collect();
            let (t0, t1) = (cfg.schedule.t_start, cfg.schedule.t_end);
            let grid: Vec<f64> = (0..=200).map(|i| t0 + (t1 - t0) * i as f64 / 200.0).collect();
            let bands = infer_trajectory(&post, &thetas, 0, &grid, 200, &mut rng)?;
            let band_path = dir.join("bands.csv");
            write_rows(
                &band_path,
                &["time", "species", "mean", "lo95", "hi95"],
                bands.iter().map(|b| {
                    vec![
                        b.time.to_string(),
                        net.species[b.species].clone(),
                        b.mean.to_string(),
                        b.lo95.to_string(),
                        b.hi95.to_string(),
                    ]
                }),
            )?;
            let truth_path = dir.join("true_path.csv");
            write_rows(
                &truth_path,
                &["time", "species", "value"],
                grid.iter().flat_map(|&t| {
                    let s = trajs[0].state_at(t).to_vec();
                    net.species.iter().zip(s).map(move |(n, x)| vec![t.to_string(), n.clone(), x.to_string()]).collect::<Vec<_>>()
                }),
            )?;
            let obs_path = dir.join("observations.csv");
            write_observations_csv(&obs_path, &post.data[..1])?;
            Ok(vec![band_path, truth_path, obs_path])
        }
        FigureKind::Violin => {
            let out = run_experiment(cfg)?;
            let samples_path = dir.join("samples.csv");
            write_samples_csv(&samples_path, &out)?;
            let violin_path = dir.join("violin.csv");
            let names: Vec<&str> = cfg.parameters.iter().map(|p| p.name.as_str()).collect();
            write_rows(
                &violin_path,
                &["replicate_id", "sample_id", "param", "log_value"],
                out.reps.iter().filter(|r| r.solved).flat_map(|r| {
                    r.samples
                        .iter()
                        .enumerate()
                        .flat_map(|(i, s)| {
                            names
                                .iter()
                                .zip(s)
                                .map(|(n, v)| vec![r.rep.to_string(), i.to_string(), n.to_string(), v.ln().to_string()])
                                .collect::<Vec<_>>()
                        })
                        .collect::<Vec<_>>()
                }),
            )?;
            let report_path = dir.join("report.json");
            write_json(&report_path, &out.report)?;
            Ok(vec![violin_path, samples_path, report_path])
        }
    }
}
