//! Monte Carlo batches over independent runs and their aggregation.

use relay_core::connectivity::ConnectivityMode;
use relay_core::planner::Algorithm;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{Result, SimError};
use crate::harness::{run, score, RunMetrics, SimulationTrace};
use crate::scenario::materialize;

/// Result of one run scored in the mode its algorithm targets, plus both
/// modes for reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub algorithm: &'static str,
    pub horizon_steps: usize,
    pub comm_range_m: f64,
    pub seed: u64,
    pub scored_mode: &'static str,
    pub metrics: RunMetrics,
    pub single_hop: RunMetrics,
    pub multi_hop: RunMetrics,
}

pub fn mode_name(mode: ConnectivityMode) -> &'static str {
    match mode {
        ConnectivityMode::SingleHop => "single_hop",
        ConnectivityMode::MultiHop => "multi_hop",
    }
}

/// Materializes, runs and scores one configuration.
pub fn run_one(cfg: &ScenarioConfig) -> Result<RunSummary> {
    let scenario = materialize(cfg.clone())?;
    let trace = run(&scenario, &cfg.planner_config(), &cfg.filter_config())?;
    summarize(cfg, &trace)
}

/// Scores a finished trace of `cfg` in both modes.
pub fn summarize(cfg: &ScenarioConfig, trace: &SimulationTrace) -> Result<RunSummary> {
    let single_hop = score(trace, ConnectivityMode::SingleHop)?;
    let multi_hop = score(trace, ConnectivityMode::MultiHop)?;
    let algorithm = cfg.algorithm();
    let mode = algorithm.scoring_mode();
    Ok(RunSummary {
        algorithm: algorithm.name(),
        horizon_steps: cfg.planner.horizon_steps,
        comm_range_m: cfg.comm_range_m,
        seed: cfg.seed,
        scored_mode: mode_name(mode),
        metrics: match mode {
            ConnectivityMode::SingleHop => single_hop,
            ConnectivityMode::MultiHop => multi_hop,
        },
        single_hop,
        multi_hop,
    })
}

/// Runs every configuration on a pool of `jobs` workers. Results come back
/// in input order whatever the pool size.
pub fn run_batch(cells: &[ScenarioConfig], jobs: usize) -> Result<Vec<Result<RunSummary>>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    Ok(pool.install(|| cells.par_iter().map(run_one).collect()))
}

/// Five-number summary plus mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Stats {
    /// Quartiles by linear interpolation between order statistics. The
    /// input order does not matter.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self {
            n: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Distribution of the scored metrics for one (algorithm, horizon, range).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub algorithm: &'static str,
    pub horizon_steps: usize,
    pub comm_range_m: f64,
    pub scored_mode: &'static str,
    pub connectivity_duration_min: Stats,
    pub max_lifetime_min: Stats,
    pub relative_connectivity: Stats,
}

/// Groups runs by (algorithm, horizon, range) in a fixed key order: the
/// algorithm listing order, then horizon, then range.
pub fn aggregate(runs: &[RunSummary]) -> Vec<Aggregate> {
    let rank = |name: &str| Algorithm::ALL.iter().position(|a| a.name() == name).unwrap_or(usize::MAX);
    let mut keys: Vec<(&'static str, usize, f64)> = Vec::new();
    for r in runs {
        let key = (r.algorithm, r.horizon_steps, r.comm_range_m);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort_by(|a, b| rank(a.0).cmp(&rank(b.0)).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    keys.into_iter()
        .map(|(algorithm, horizon_steps, comm_range_m)| {
            let cell: Vec<&RunSummary> = runs
                .iter()
                .filter(|r| r.algorithm == algorithm && r.horizon_steps == horizon_steps && r.comm_range_m == comm_range_m)
                .collect();
            let pick = |f: fn(&RunMetrics) -> f64| {
                Stats::of(&cell.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>()).expect("non-empty cell")
            };
            Aggregate {
                algorithm,
                horizon_steps,
                comm_range_m,
                scored_mode: cell[0].scored_mode,
                connectivity_duration_min: pick(|m| m.connectivity_duration_min),
                max_lifetime_min: pick(|m| m.max_lifetime_min),
                relative_connectivity: pick(|m| m.relative_connectivity),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_known_sample() {
        let s = Stats::of(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max, s.mean), (1.0, 2.0, 3.0, 4.0, 5.0, 3.0));
        let s = Stats::of(&[1.0, 2.0]).unwrap();
        assert_eq!(s.median, 1.5);
        assert_eq!(s.q1, 1.25);
        assert!(Stats::of(&[]).is_none());
        assert!(Stats::of(&[f64::NAN]).is_none());
    }

    #[test]
    fn single_value_statistics_collapse() {
        let s = Stats::of(&[0.7]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max, s.mean), (0.7, 0.7, 0.7, 0.7, 0.7, 0.7));
    }
}
