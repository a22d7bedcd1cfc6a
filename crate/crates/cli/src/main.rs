use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use srn_core::experiment::{
    emit_figure_data, infer_replication, io::write_outputs, preset, run_experiment, summarize, ExperimentConfig,
    ExperimentOutput, FigureKind, SamplerKind, PRESET_NAMES,
};
use srn_core::numerics::RngStream;
use srn_core::simulate::io::{read_observations_csv, write_observations_csv, write_trajectories_csv};
use srn_core::simulate::simulate_dataset;
use srn_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_ALL_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "srn", version, about = "Parameter inference for stochastic reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate exact trajectories and noisy observations.
    Simulate(Common),
    /// Run replicated inference, or a single run on `--data`.
    Infer {
        #[command(flatten)]
        common: Common,
        /// Observation CSV to infer from instead of synthetic replications.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Run a built-in case study.
    Reproduce {
        /// enzyme, lotka or genenet
        #[arg(value_name = "CASE")]
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Write the data behind a figure as CSV.
    EmitFigureData {
        /// diffusion-compare, trajectory-bands or violin
        kind: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in case used when no `--config` is given.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    sampler: Option<String>,
    /// Number of observation intervals.
    #[arg(long = "H")]
    h: Option<usize>,
    /// Step-size constant.
    #[arg(long)]
    c: Option<f64>,
}

enum Failure {
    Config(anyhow::Error),
    AllFailed,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let is_config = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<Error>(),
                Some(Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidNetwork(_) | Error::DimensionMismatch(_))
            )
        });
        if is_config {
            Failure::Config(e)
        } else {
            Failure::Other(e)
        }
    }
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn load_config(common: &Common, case: Option<&str>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (&common.config, case.or(common.case.as_deref())) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(config_err)?;
            ExperimentConfig::from_json(&text).map_err(config_err)?
        }
        (None, Some(name)) => preset(name).map_err(config_err)?,
        (None, None) => {
            return Err(config_err(anyhow::anyhow!(
                "pass --config PATH or --case NAME (one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.reps = reps;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(s) = &common.sampler {
        cfg.sampler = SamplerKind::parse(s).map_err(config_err)?;
    }
    if let Some(h) = common.h {
        cfg = cfg.with_intervals(h);
    }
    if let Some(c) = common.c {
        cfg.tuning.c = c;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn finish(out: &ExperimentOutput, dir: &Path) -> Result<(), Failure> {
    write_outputs(dir, out).context("writing outputs")?;
    let r = &out.report;
    println!("{}: {} / {} replications solved with {}", r.name, r.solved, r.reps, r.sampler);
    for p in &r.params {
        if let Some(s) = &p.rmse {
            println!("  rmse({}) = {:.6} +/- {:.6}", p.name, s.mean, s.ci95);
        }
    }
    if let Some(l) = &r.lambda_max {
        println!("  lambda_max = {:.6} +/- {:.6}", l.mean, l.ci95);
    }
    println!("  outputs in {}", dir.display());
    if r.reps > 0 && r.solved == 0 {
        return Err(Failure::AllFailed);
    }
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).context("creating output directory")?;
    for rep in 0..cfg.reps {
        let mut rng = RngStream::new(cfg.seed, 2 * rep as u64);
        let (trajs, obs) = simulate_dataset(
            &cfg.network,
            &cfg.initial_state,
            &cfg.truth.rates,
            &cfg.schedule.schedule(),
            &cfg.truth.noise,
            cfg.trajectories,
            &mut rng,
        )
        .context("simulating")?;
        let sub = dir.join(format!("rep_{rep:03}"));
        fs::create_dir_all(&sub).context("creating output directory")?;
        write_trajectories_csv(&sub.join("trajectories.csv"), &trajs, &cfg.network.species).context("writing")?;
        write_observations_csv(&sub.join("observations.csv"), &obs).context("writing")?;
    }
    println!("{} datasets written to {}", cfg.reps, dir.display());
    Ok(())
}

fn infer_on_file(cfg: &ExperimentConfig, path: &Path, dir: &Path) -> Result<(), Failure> {
    let data = read_observations_csv(path).with_context(|| format!("reading {}", path.display())).map_err(config_err)?;
    let start = std::time::Instant::now();
    let res = match infer_replication(cfg, data, 0) {
        Ok(mut r) => {
            r.seconds = start.elapsed().as_secs_f64();
            r
        }
        Err(e) => srn_core::experiment::ReplicationResult::failed(0, &e, start.elapsed().as_secs_f64()),
    };
    let mut cfg = cfg.clone();
    cfg.reps = 1;
    let reps = vec![res];
    let report = summarize(&cfg, &reps);
    finish(&ExperimentOutput { config: cfg, report, reps }, dir)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = load_config(&common, None)?;
            simulate(&cfg, &common.out)
        }
        Command::Infer { common, data } => {
            let cfg = load_config(&common, None)?;
            match data {
                Some(path) => infer_on_file(&cfg, &path, &common.out),
                None => {
                    let out = run_experiment(&cfg).context("running experiment")?;
                    finish(&out, &common.out)
                }
            }
        }
        Command::Reproduce { name, common } => {
            let cfg = load_config(&common, Some(&name))?;
            let out = run_experiment(&cfg).context("running experiment")?;
            finish(&out, &common.out)
        }
        Command::EmitFigureData { kind, common } => {
            let kind = FigureKind::parse(&kind).map_err(config_err)?;
            let cfg = if common.config.is_none() && common.case.is_none() {
                let default = if kind == FigureKind::DiffusionCompare { "lotka" } else { "enzyme" };
                load_config(&common, Some(default))?
            } else {
                load_config(&common, None)?
            };
            let files = emit_figure_data(kind, &cfg, &common.out).context("emitting figure data")?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::AllFailed) => {
            eprintln!("every replication failed");
            ExitCode::from(EXIT_ALL_FAILED)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
