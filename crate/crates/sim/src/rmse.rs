//! Open-loop estimator study: filters fed a measurement every step over the
//! scenario's tracker plans, repeated over independent noise draws.

use relay_core::estimator::{predict, update, FilterState};
use serde::Serialize;

use crate::error::{Result, SimError};
use crate::harness::{measure, truth_at};
use crate::scenario::{stream_rng, Scenario};

/// Noise streams for study runs start here so they never coincide with the
/// closed-loop measurement stream.
const STUDY_STREAM_BASE: u64 = 1 << 32;

/// Fraction of the run treated as filter burn-in by [`RmseCurve::steady_state`].
pub const BURN_IN_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RmseCurve {
    pub runs: usize,
    pub time_s: Vec<f64>,
    pub position_m: Vec<f64>,
    pub velocity_mps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub position_m: f64,
    pub velocity_mps: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl RmseCurve {
    /// Medians of the per-step curves once the burn-in is over.
    pub fn steady_state(&self) -> SteadyState {
        let skip = (self.time_s.len() as f64 * BURN_IN_FRACTION).ceil() as usize;
        SteadyState {
            position_m: median(&self.position_m[skip.min(self.position_m.len())..]),
            velocity_mps: median(&self.velocity_mps[skip.min(self.velocity_mps.len())..]),
        }
    }
}

/// Squared horizontal errors summed over trackers, per step.
fn one_run(scenario: &Scenario, index: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let cfg = &scenario.config;
    let filter_cfg = cfg.filter_config();
    let mut rng = stream_rng(cfg.seed, STUDY_STREAM_BASE + index as u64);
    let steps = cfg.steps();
    let mut pos = Vec::with_capacity(steps);
    let mut vel = Vec::with_capacity(steps);
    let mut filters: Vec<FilterState> = Vec::new();
    for k in 0..steps {
        let truth = truth_at(scenario, k as f64 * cfg.step_dt_s)?;
        let at = |source| SimError::Step { step: k, source };
        if k == 0 {
            for s in &truth {
                filters.push(FilterState::from_measurement(&measure(s, &filter_cfg, &mut rng), &filter_cfg).map_err(at)?);
            }
        } else {
            for (f, s) in filters.iter_mut().zip(&truth) {
                let prior = predict(f, [0.0; 3], &filter_cfg).map_err(at)?;
                *f = update(&prior, &measure(s, &filter_cfg, &mut rng), &filter_cfg).map_err(at)?;
            }
        }
        let (mut ep, mut ev) = (0.0, 0.0);
        for (f, s) in filters.iter().zip(&truth) {
            for axis in 0..2 {
                ep += (f.estimate.position[axis] - s.position[axis]).powi(2);
                ev += (f.estimate.velocity[axis] - s.velocity[axis]).powi(2);
            }
        }
        pos.push(ep);
        vel.push(ev);
    }
    Ok((pos, vel))
}

/// Per-step RMSE over `runs` noise realisations and all trackers. Runs are
/// spread over `jobs` workers and reduced in run order.
pub fn rmse_study(scenario: &Scenario, runs: usize, jobs: usize) -> Result<RmseCurve> {
    use rayon::prelude::*;
    if runs == 0 {
        return Err(SimError::config("runs", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let results: Vec<Result<(Vec<f64>, Vec<f64>)>> =
        pool.install(|| (0..runs).into_par_iter().map(|m| one_run(scenario, m)).collect());
    let cfg = &scenario.config;
    let steps = cfg.steps();
    let mut pos = vec![0.0; steps];
    let mut vel = vec![0.0; steps];
    for r in results {
        let (p, v) = r?;
        for k in 0..steps {
            pos[k] += p[k];
            vel[k] += v[k];
        }
    }
    let n = (runs * cfg.n_trackers) as f64;
    Ok(RmseCurve {
        runs,
        time_s: (0..steps).map(|k| k as f64 * cfg.step_dt_s).collect(),
        position_m: pos.into_iter().map(|s| (s / n).sqrt()).collect(),
        velocity_mps: vel.into_iter().map(|s| (s / n).sqrt()).collect(),
    })
}
