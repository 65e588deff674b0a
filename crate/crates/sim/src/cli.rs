//! Command-line front end. Data goes to files under `--out`; log lines go to
//! standard error as `level=.. step=.. msg=".."`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::batch::summarize;
use crate::config::{default_preset, AlgorithmName, ScenarioConfig, DEFAULT_RANGES_M};
use crate::error::{Result, SimError};
use crate::harness::run;
use crate::output::{
    metrics_json, to_json, write_aggregate_csv, write_cells_csv, write_file, write_rmse_csv, write_trace_csv,
    RmseSummary,
};
use crate::rmse::{rmse_study, BURN_IN_FRACTION};
use crate::scenario::materialize;
use crate::sweep::{run_sweep, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "relay-sim", version, about = "Relay UAV trajectory planning simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario; writes trace.csv and metrics.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm_override: Option<AlgorithmName>,
    },
    /// Run every cell of a sweep; writes cells.csv, aggregate.csv and
    /// aggregate.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm_override: Option<AlgorithmName>,
    },
    /// Estimator RMSE over repeated noise draws; writes rmse.csv and
    /// rmse_summary.json.
    Rmse {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Write the reference scenario and sweep files.
    Preset {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_algorithm(s: &str) -> std::result::Result<AlgorithmName, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown algorithm `{s}`"))
}

pub fn log(level: &str, step: Option<usize>, msg: &str) {
    let step = step.map_or_else(|| "-".to_string(), |s| s.to_string());
    eprintln!("level={level} step={step} msg={msg:?}");
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn apply_overrides(cfg: &mut ScenarioConfig, seed: Option<u64>, algorithm: Option<AlgorithmName>) {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(a) = algorithm {
        cfg.planner.algorithm = a;
    }
}

pub fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, algorithm: Option<AlgorithmName>) -> Result<()> {
    let mut cfg = ScenarioConfig::load(config)?;
    apply_overrides(&mut cfg, seed, algorithm);
    cfg.validate()?;
    prepare_out(out)?;
    log("info", None, &format!("run {} seed {}", cfg.algorithm().name(), cfg.seed));
    let scenario = materialize(cfg.clone())?;
    let trace = run(&scenario, &cfg.planner_config(), &cfg.filter_config())?;
    let summary = summarize(&cfg, &trace)?;
    let mut csv = Vec::new();
    write_trace_csv(&trace, &mut csv)?;
    write_file(&out.join("trace.csv"), &csv)?;
    write_file(&out.join("metrics.json"), metrics_json(&summary)?.as_bytes())?;
    log(
        "info",
        Some(trace.records.len()),
        &format!(
            "connected {:.1} of {:.1} feasible minutes",
            summary.metrics.connectivity_duration_min, summary.metrics.max_lifetime_min
        ),
    );
    Ok(())
}

#[derive(Serialize)]
struct AggregateDoc<'a> {
    rows: &'a [crate::batch::Aggregate],
}

/// Returns the number of failed cells.
pub fn cmd_sweep(
    config: &Path,
    out: &Path,
    jobs: usize,
    seed: Option<u64>,
    algorithm: Option<AlgorithmName>,
) -> Result<usize> {
    let mut spec = SweepSpec::load(config)?;
    if let Some(s) = seed {
        spec.seeds = vec![s];
    }
    if let Some(a) = algorithm {
        spec.algorithms = vec![a];
    }
    spec.validate()?;
    prepare_out(out)?;
    log("info", None, &format!("sweep of {} cells on {} workers", spec.cells().len(), jobs.max(1)));
    let outcome = run_sweep(&spec, jobs)?;
    for (label, r) in &outcome.cells {
        if let Err(e) = r {
            log("error", None, &format!("cell {label} failed: {e}"));
        }
    }
    let mut cells = Vec::new();
    write_cells_csv(&outcome.cells, &mut cells)?;
    write_file(&out.join("cells.csv"), &cells)?;
    let mut agg = Vec::new();
    write_aggregate_csv(&outcome.aggregate, &mut agg)?;
    write_file(&out.join("aggregate.csv"), &agg)?;
    write_file(&out.join("aggregate.json"), to_json(&AggregateDoc { rows: &outcome.aggregate })?.as_bytes())?;
    Ok(outcome.failures())
}

pub fn cmd_rmse(config: &Path, out: &Path, runs: usize, jobs: usize, seed: Option<u64>) -> Result<()> {
    let mut cfg = ScenarioConfig::load(config)?;
    apply_overrides(&mut cfg, seed, None);
    if runs == 0 {
        return Err(SimError::config("runs", "must be at least 1"));
    }
    prepare_out(out)?;
    let scenario = materialize(cfg.clone())?;
    log("info", None, &format!("rmse study over {runs} runs"));
    let curve = rmse_study(&scenario, runs, jobs)?;
    let steady = curve.steady_state();
    let mut csv = Vec::new();
    write_rmse_csv(&curve, &mut csv)?;
    write_file(&out.join("rmse.csv"), &csv)?;
    let summary = RmseSummary { runs, seed: cfg.seed, burn_in_fraction: BURN_IN_FRACTION, steady_state: steady };
    write_file(&out.join("rmse_summary.json"), to_json(&summary)?.as_bytes())?;
    log(
        "info",
        None,
        &format!("steady state {:.3} m, {:.4} m/s", steady.position_m, steady.velocity_mps),
    );
    Ok(())
}

/// Reference sweep: every algorithm, no horizon and an 8 s horizon, the
/// four reference ranges, twenty seeds.
pub fn default_sweep() -> SweepSpec {
    SweepSpec {
        base: default_preset(),
        algorithms: vec![
            AlgorithmName::SingleHop,
            AlgorithmName::NearestPoint,
            AlgorithmName::Midpoint,
            AlgorithmName::Hybrid,
            AlgorithmName::CenterOfMass,
        ],
        horizons: vec![1, 4],
        comm_ranges_m: DEFAULT_RANGES_M.to_vec(),
        seeds: (1..=20).collect(),
    }
}

pub fn cmd_preset(out: &Path) -> Result<()> {
    prepare_out(out)?;
    write_file(&out.join("scenario.json"), format!("{}\n", default_preset().to_json()).as_bytes())?;
    let sweep = serde_json::to_string_pretty(&default_sweep())? + "\n";
    write_file(&out.join("sweep.json"), sweep.as_bytes())?;
    Ok(())
}

fn exit_for(e: &SimError) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Run { config, out, seed_override, algorithm_override } => {
            cmd_run(&config, &out, seed_override, algorithm_override)
        }
        Command::Sweep { config, out, jobs, seed_override, algorithm_override } => {
            match cmd_sweep(&config, &out, jobs, seed_override, algorithm_override) {
                Ok(0) => Ok(()),
                Ok(n) => {
                    log("error", None, &format!("{n} cells failed"));
                    return EXIT_RUNTIME;
                }
                Err(e) => Err(e),
            }
        }
        Command::Rmse { config, out, runs, jobs, seed_override } => cmd_rmse(&config, &out, runs, jobs, seed_override),
        Command::Preset { out } => cmd_preset(&out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let step = match &e {
                SimError::Step { step, .. } => Some(*step),
                _ => None,
            };
            log("error", step, &e.to_string());
            exit_for(&e)
        }
    }
}
