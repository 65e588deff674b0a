//! Vehicle motion: constant-altitude relay kinematics under speed and
//! per-step turn limits, discrete control enumeration, and piecewise
//! constant-velocity tracker plans.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::estimator::KinematicState;
use crate::geometry::Point;
use crate::{Error, Result};

/// Slack on the turn-rate and speed bounds for values read back from
/// degree conversions.
const LIMIT_EPS: f64 = 1e-12;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = libm::remainder(theta, 2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayLimits {
    pub speed_min: f64,
    pub speed_max: f64,
    /// Largest heading change allowed in one step [rad].
    pub max_turn: f64,
}

impl RelayLimits {
    pub fn validate(&self) -> Result<()> {
        let ok = self.speed_min.is_finite()
            && self.speed_max.is_finite()
            && self.max_turn.is_finite()
            && 0.0 <= self.speed_min
            && self.speed_min <= self.speed_max
            && self.max_turn >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("relay limits need 0 <= speed_min <= speed_max and max_turn >= 0"))
        }
    }

    pub fn admits(&self, u: &ControlInput) -> bool {
        u.speed.is_finite()
            && u.heading_delta.is_finite()
            && u.speed >= self.speed_min - LIMIT_EPS
            && u.speed <= self.speed_max + LIMIT_EPS
            && u.heading_delta.abs() <= self.max_turn + LIMIT_EPS
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayState {
    pub position: Point,
    /// Heading in `(-pi, pi]`.
    pub heading: f64,
    pub speed: f64,
}

impl RelayState {
    pub fn new(position: Point, heading: f64, speed: f64) -> Self {
        Self { position, heading: normalize_angle(heading), speed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    pub speed: f64,
    pub heading_delta: f64,
}

/// Advances the relay one step: turn first, then fly straight at the new
/// heading.
pub fn step_relay(state: &RelayState, u: &ControlInput, dt: f64, limits: &RelayLimits) -> Result<RelayState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("step dt must be > 0"));
    }
    if !limits.admits(u) {
        return Err(Error::invalid(format!(
            "control (speed {}, turn {}) violates limits {:?}",
            u.speed, u.heading_delta, limits
        )));
    }
    Ok(step_unchecked(state, u, dt))
}

#[inline]
pub(crate) fn step_unchecked(state: &RelayState, u: &ControlInput, dt: f64) -> RelayState {
    let heading = normalize_angle(state.heading + u.heading_delta);
    let (s, c) = libm::sincos(heading);
    let dist = u.speed * dt;
    RelayState {
        position: Point::new(state.position.x + dist * c, state.position.y + dist * s),
        heading,
        speed: u.speed,
    }
}

/// The finite control alphabet: every speed paired with every turn.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSet {
    pub speeds: Vec<f64>,
    pub heading_deltas: Vec<f64>,
}

impl ControlSet {
    pub fn new(speeds: Vec<f64>, heading_deltas: Vec<f64>) -> Result<Self> {
        if speeds.is_empty() || heading_deltas.is_empty() {
            return Err(Error::invalid("control set needs at least one speed and one turn"));
        }
        if speeds.iter().chain(&heading_deltas).any(|v| !v.is_finite()) || speeds.iter().any(|&s| s < 0.0) {
            return Err(Error::invalid("control set values must be finite and speeds >= 0"));
        }
        Ok(Self { speeds, heading_deltas })
    }

    /// Limits implied by the set itself.
    pub fn limits(&self) -> RelayLimits {
        let speed_min = self.speeds.iter().copied().fold(f64::INFINITY, f64::min);
        let speed_max = self.speeds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_turn = self.heading_deltas.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        RelayLimits { speed_min, speed_max, max_turn }
    }

    pub fn len(&self) -> usize {
        self.speeds.len() * self.heading_deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Speed-major order: `(s0, d0), (s0, d1), ..., (s1, d0), ...`.
    pub fn inputs(&self) -> Vec<ControlInput> {
        self.speeds
            .iter()
            .flat_map(|&speed| self.heading_deltas.iter().map(move |&heading_delta| ControlInput { speed, heading_delta }))
            .collect()
    }
}

/// All `|set|^horizon` control sequences in lexicographic order of
/// [`ControlSet::inputs`]. A zero horizon yields the single empty sequence.
pub fn enumerate_control_sequences(set: &ControlSet, horizon: usize) -> Vec<Vec<ControlInput>> {
    let alphabet = set.inputs();
    let mut out: Vec<Vec<ControlInput>> = alloc::vec![Vec::new()];
    for _ in 0..horizon {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |u| {
                    let mut seq = prefix.clone();
                    seq.push(*u);
                    seq
                })
            })
            .collect();
    }
    out
}

/// One constant-velocity leg of a tracker plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSegment {
    pub start_time: f64,
    pub speed: f64,
    pub heading: f64,
}

/// A piecewise constant-velocity flight at fixed altitude over
/// `[segments[0].start_time, end_time]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerPlan {
    origin: Point,
    altitude: f64,
    segments: Vec<PlanSegment>,
    end_time: f64,
    /// Position at the start of each segment.
    waypoints: Vec<Point>,
}

impl TrackerPlan {
    pub fn new(origin: Point, altitude: f64, segments: Vec<PlanSegment>, end_time: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("tracker plan needs at least one segment"));
        }
        if !origin.is_finite() || !altitude.is_finite() || !end_time.is_finite() {
            return Err(Error::invalid("tracker plan values must be finite"));
        }
        for pair in segments.windows(2) {
            if !(pair[1].start_time > pair[0].start_time) {
                return Err(Error::invalid("segment start times must be strictly increasing"));
            }
        }
        let last = segments[segments.len() - 1].start_time;
        if end_time < last {
            return Err(Error::invalid("plan end precedes its last segment"));
        }
        if segments.iter().any(|s| !(s.start_time.is_finite() && s.speed.is_finite() && s.heading.is_finite())) {
            return Err(Error::invalid("segment values must be finite"));
        }
        let mut waypoints = Vec::with_capacity(segments.len());
        let mut pos = origin;
        waypoints.push(pos);
        for pair in segments.windows(2) {
            pos = advance(pos, &pair[0], pair[1].start_time - pair[0].start_time);
            waypoints.push(pos);
        }
        Ok(Self { origin, altitude, segments, end_time, waypoints })
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn segments(&self) -> &[PlanSegment] {
        &self.segments
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].start_time
    }

    pub fn end_time(&self) -> f64 {
        self.end_time
    }

    /// Truth state at `t`. Segments are left-closed: at a maneuver instant
    /// the new velocity already applies.
    pub fn state_at(&self, t: f64) -> Result<KinematicState> {
        if !(t >= self.start_time() && t <= self.end_time) {
            return Err(Error::invalid(format!(
                "time {t} outside plan window [{}, {}]",
                self.start_time(),
                self.end_time
            )));
        }
        let idx = self.segments.partition_point(|s| s.start_time <= t) - 1;
        let seg = &self.segments[idx];
        let p = advance(self.waypoints[idx], seg, t - seg.start_time);
        let (s, c) = libm::sincos(seg.heading);
        Ok(KinematicState::new([p.x, p.y, self.altitude], [seg.speed * c, seg.speed * s, 0.0]))
    }
}

fn advance(from: Point, seg: &PlanSegment, elapsed: f64) -> Point {
    let (s, c) = libm::sincos(seg.heading);
    Point::new(from.x + seg.speed * elapsed * c, from.y + seg.speed * elapsed * s)
}

/// Free-function form of [`TrackerPlan::state_at`].
pub fn tracker_position(plan: &TrackerPlan, t: f64) -> Result<KinematicState> {
    plan.state_at(t)
}
