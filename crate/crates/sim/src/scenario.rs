//! Materialized scenarios: seeded tracker flight plans and the relay start.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relay_core::mobility::{normalize_angle, PlanSegment, RelayState, TrackerPlan};
use relay_core::Point;

use crate::config::ScenarioConfig;
use crate::error::{Result, SimError};

/// RNG stream for maneuver schedules; measurement noise uses other streams.
pub(crate) const PLAN_STREAM: u64 = 0;

/// Maneuver instants are spread uniformly over this fraction either side of
/// the nominal period.
pub const MANEUVER_JITTER: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub plans: Vec<TrackerPlan>,
    pub relay_initial: RelayState,
}

impl Scenario {
    pub fn initial_positions(&self) -> Vec<Point> {
        self.config.initial_positions_m.iter().map(|p| Point::new(p[0], p[1])).collect()
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the tracker plans and the relay start from a validated config.
///
/// Each tracker flies constant-velocity legs. The first heading is uniform
/// on (-pi, pi]; at each maneuver it turns by an amount uniform within the
/// configured bound, and the speed is redrawn from the speed class.
pub fn materialize(config: ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, PLAN_STREAM);
    let speeds = config.speed_class.speeds();
    let duration = config.sim_duration_s;
    let period = config.maneuver_period_s;
    let max_turn = config.maneuver_turn_max_deg.to_radians();
    let mut plans = Vec::with_capacity(config.n_trackers);
    for origin in &config.initial_positions_m {
        let mut segments = Vec::new();
        let mut t = 0.0;
        let mut heading = PI - 2.0 * PI * rng.random::<f64>();
        while t < duration {
            if !segments.is_empty() {
                heading = normalize_angle(heading + max_turn * (1.0 - 2.0 * rng.random::<f64>()));
            }
            let speed = speeds[rng.random_range(0..speeds.len())];
            segments.push(PlanSegment { start_time: t, speed, heading });
            t += period * rng.random_range(1.0 - MANEUVER_JITTER..=1.0 + MANEUVER_JITTER);
        }
        let plan = TrackerPlan::new(Point::new(origin[0], origin[1]), 0.0, segments, duration)
            .map_err(|e| SimError::config("initial_positions_m", e.to_string()))?;
        plans.push(plan);
    }
    let starts: Vec<Point> = config.initial_positions_m.iter().map(|p| Point::new(p[0], p[1])).collect();
    let centroid = Point::centroid(&starts).expect("at least one tracker");
    let s = &config.planner.speed_set_mps;
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let relay_initial = RelayState::new(centroid, 0.0, 0.5 * (lo + hi));
    Ok(Scenario { config, plans, relay_initial })
}
