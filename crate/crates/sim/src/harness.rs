//! Closed-loop simulation: truth, noisy measurements, filters, planner,
//! relay motion and per-step scoring.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use relay_core::connectivity::{ground_truth_connected, ConnectivityMode};
use relay_core::estimator::{predict, update, FilterConfig, FilterState, KinematicState, Measurement};
use relay_core::feasibility::{max_lifetime, FeasibilityVerdict};
use relay_core::mobility::{step_relay, ControlInput, RelayState};
use relay_core::planner::{Algorithm, ObjectiveValue, PlanDecision, Planner, PlannerConfig, TrackerEstimate};
use relay_core::Point;
use serde::Serialize;

use crate::config::Replan;
use crate::error::{Result, SimError};
use crate::scenario::{stream_rng, Scenario};

/// RNG stream for the measurement noise of a closed-loop run.
pub(crate) const MEASUREMENT_STREAM: u64 = 1;

/// Snapshot at `time` and the decision taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub truth: Vec<KinematicState>,
    pub estimates: Vec<TrackerEstimate>,
    /// Current uncertainty radius per tracker.
    pub radii: Vec<f64>,
    pub relay: RelayState,
    pub control: ControlInput,
    pub objective_used: Algorithm,
    pub objective: ObjectiveValue,
    pub connected_single_hop: bool,
    pub connected_multi_hop: bool,
    pub feasible_single_hop: bool,
    pub feasible_multi_hop: bool,
}

impl StepRecord {
    pub fn connected(&self, mode: ConnectivityMode) -> bool {
        match mode {
            ConnectivityMode::SingleHop => self.connected_single_hop,
            ConnectivityMode::MultiHop => self.connected_multi_hop,
        }
    }

    pub fn feasible(&self, mode: ConnectivityMode) -> bool {
        match mode {
            ConnectivityMode::SingleHop => self.feasible_single_hop,
            ConnectivityMode::MultiHop => self.feasible_multi_hop,
        }
    }

    pub fn true_positions(&self) -> Vec<Point> {
        self.truth.iter().map(|s| Point::new(s.position[0], s.position[1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub step_dt: f64,
    pub comm_range: f64,
    pub algorithm: Algorithm,
    pub records: Vec<StepRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunMetrics {
    pub connectivity_duration_min: f64,
    pub max_lifetime_min: f64,
    pub relative_connectivity: f64,
    pub rmse_position_m: f64,
    pub rmse_velocity_mps: f64,
}

fn horizontal(s: &KinematicState) -> (Point, Point) {
    (Point::new(s.position[0], s.position[1]), Point::new(s.velocity[0], s.velocity[1]))
}

/// Truth plus independent Gaussian noise on every axis with a non-zero
/// deviation.
pub(crate) fn measure(truth: &KinematicState, cfg: &FilterConfig, rng: &mut ChaCha8Rng) -> Measurement {
    let mut z = truth.to_vector();
    let sig = [cfg.sigma_gps, cfg.sigma_vel];
    for (block, sigmas) in sig.iter().enumerate() {
        for axis in 0..3 {
            let s = sigmas[axis];
            if s > 0.0 {
                let n = Normal::new(0.0, s).expect("validated deviation");
                z[3 * block + axis] += n.sample(rng);
            }
        }
    }
    Measurement { z }
}

pub(crate) fn truth_at(scenario: &Scenario, t: f64) -> Result<Vec<KinematicState>> {
    scenario.plans.iter().map(|p| p.state_at(t).map_err(SimError::from)).collect()
}

/// Runs the closed loop over the whole scenario.
///
/// Filters are seeded from the first measurement, predicted every step and
/// corrected every estimate period. The planner sees the filtered positions
/// and velocities together with the time since the last correction.
pub fn run(scenario: &Scenario, planner_cfg: &PlannerConfig, noise_cfg: &FilterConfig) -> Result<SimulationTrace> {
    let cfg = &scenario.config;
    let steps = cfg.steps();
    let refresh = cfg.steps_per_estimate();
    let dt = cfg.step_dt_s;
    let range = planner_cfg.comm_range;
    let noise_cfg = noise_cfg.with_dt(dt);
    noise_cfg.validate().map_err(|e| SimError::config("noise", e.to_string()))?;
    let planner = Planner::new(planner_cfg.clone(), cfg.n_trackers).map_err(|source| SimError::Step { step: 0, source })?;
    let limits = planner_cfg.limits();
    let mut rng = stream_rng(cfg.seed, MEASUREMENT_STREAM);

    let mut filters: Vec<FilterState> = Vec::with_capacity(cfg.n_trackers);
    let mut relay = scenario.relay_initial;
    let mut last_refresh = 0usize;
    let mut pending: Vec<ControlInput> = Vec::new();
    let mut last: Option<(ControlInput, Algorithm, ObjectiveValue)> = None;
    let mut records = Vec::with_capacity(steps);

    for k in 0..steps {
        let time = k as f64 * dt;
        let truth = truth_at(scenario, time)?;
        let at = |source: relay_core::Error| SimError::Step { step: k, source };
        if k == 0 {
            for s in &truth {
                filters.push(FilterState::from_measurement(&measure(s, &noise_cfg, &mut rng), &noise_cfg).map_err(at)?);
            }
        } else {
            let refreshing = k % refresh == 0;
            for (f, s) in filters.iter_mut().zip(&truth) {
                let mut next = predict(f, [0.0; 3], &noise_cfg).map_err(at)?;
                if refreshing {
                    next = update(&next, &measure(s, &noise_cfg, &mut rng), &noise_cfg).map_err(at)?;
                }
                *f = next;
            }
            if refreshing {
                last_refresh = k;
            }
        }
        let age = (k - last_refresh) as f64 * dt;
        let estimates: Vec<TrackerEstimate> = filters
            .iter()
            .map(|f| {
                let (position, velocity) = horizontal(&f.estimate);
                TrackerEstimate { position, velocity, age }
            })
            .collect();
        let radii = estimates.iter().map(|e| e.forecast(0.0, planner_cfg.k_uncertainty).radius).collect();

        let replan = match cfg.planner.replan {
            Replan::EveryStep => true,
            Replan::RefreshOnly => k == last_refresh || last.is_none(),
        };
        let (control, used, objective) = if replan {
            let d: PlanDecision = planner.plan(&estimates, &relay).map_err(at)?;
            pending = d.controls[1..].iter().rev().copied().collect();
            (d.first_control(), d.objective_used, d.objective)
        } else {
            let (prev, used, objective) = last.expect("planned at step 0");
            let u = pending.pop().unwrap_or(ControlInput { speed: prev.speed, heading_delta: 0.0 });
            (u, used, objective)
        };
        last = Some((control, used, objective));

        let positions: Vec<Point> = truth.iter().map(|s| horizontal(s).0).collect();
        let verdict = FeasibilityVerdict::evaluate(&positions, range).map_err(at)?;
        records.push(StepRecord {
            step: k,
            time,
            connected_single_hop: ground_truth_connected(&positions, relay.position, range, ConnectivityMode::SingleHop),
            connected_multi_hop: ground_truth_connected(&positions, relay.position, range, ConnectivityMode::MultiHop),
            feasible_single_hop: verdict.single_hop_feasible,
            feasible_multi_hop: verdict.multi_hop_feasible,
            truth,
            estimates,
            radii,
            relay,
            control,
            objective_used: used,
            objective,
        });
        relay = step_relay(&relay, &control, dt, &limits).map_err(at)?;
    }
    Ok(SimulationTrace { step_dt: dt, comm_range: range, algorithm: planner_cfg.algorithm, records })
}

/// Connectivity achieved against the geometric optimum, plus filter error.
pub fn score(trace: &SimulationTrace, mode: ConnectivityMode) -> Result<RunMetrics> {
    let dt = trace.step_dt;
    let connected = trace.records.iter().filter(|r| r.connected(mode)).count() as f64 * dt;
    let positions: Vec<Vec<Point>> = trace.records.iter().map(StepRecord::true_positions).collect();
    let lifetime = max_lifetime(&positions, trace.comm_range, mode, dt)?;
    let relative = if lifetime > 0.0 { connected / lifetime } else { 1.0 };
    let (mut pos_sq, mut vel_sq, mut n) = (0.0, 0.0, 0usize);
    for r in &trace.records {
        for (truth, est) in r.truth.iter().zip(&r.estimates) {
            let (p, v) = horizontal(truth);
            pos_sq += (est.position - p).dot(est.position - p);
            vel_sq += (est.velocity - v).dot(est.velocity - v);
            n += 1;
        }
    }
    let n = n.max(1) as f64;
    Ok(RunMetrics {
        connectivity_duration_min: connected / 60.0,
        max_lifetime_min: lifetime / 60.0,
        relative_connectivity: relative,
        rmse_position_m: (pos_sq / n).sqrt(),
        rmse_velocity_mps: (vel_sq / n).sqrt(),
    })
}
