//! Receding-horizon relay planning.
//!
//! Each epoch the planner forecasts the trackers' uncertainty disks over the
//! horizon, simulates every control sequence from the control alphabet, and
//! keeps the sequence maximising a running connectivity term (summed over
//! horizon steps) plus a small terminal distance penalty. Ties go to the
//! first sequence in lexicographic enumeration order.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::connectivity::{
    network_connectivity, relay_link_probability_unchecked, single_hop_unchecked, tracker_link_probability,
    ConnectivityMode, EdgeProbabilityVector, EdgeStateTable, RelayConditioned, UncertaintyDisk,
};
use crate::geometry::{Point, QuadratureConfig};
use crate::mobility::{step_unchecked, ControlInput, ControlSet, RelayLimits, RelayState};
use crate::{Error, Result};

/// Upper bound on enumerated control sequences per epoch.
pub const MAX_CANDIDATES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    SingleHop,
    NearestPoint,
    Midpoint,
    Hybrid,
    CenterOfMass,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::SingleHop,
        Algorithm::NearestPoint,
        Algorithm::Midpoint,
        Algorithm::Hybrid,
        Algorithm::CenterOfMass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SingleHop => "single_hop",
            Algorithm::NearestPoint => "nearest_point",
            Algorithm::Midpoint => "midpoint",
            Algorithm::Hybrid => "hybrid",
            Algorithm::CenterOfMass => "center_of_mass",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Topology an algorithm is judged against: the single-hop planner and
    /// the centroid baseline aim for a star, the rest for any connected
    /// graph.
    pub fn scoring_mode(self) -> ConnectivityMode {
        match self {
            Algorithm::SingleHop | Algorithm::CenterOfMass => ConnectivityMode::SingleHop,
            _ => ConnectivityMode::MultiHop,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub algorithm: Algorithm,
    /// Lookahead steps; `0` means one-step lookahead.
    pub horizon_steps: usize,
    pub epsilon: f64,
    pub controls: ControlSet,
    pub step_dt: f64,
    pub comm_range: f64,
    /// Scale of the uncertainty radius `k * |v| * age`.
    pub k_uncertainty: f64,
    pub quad: QuadratureConfig,
}

impl PlannerConfig {
    /// Speeds {20, 30, 40} m/s, turns {-30, 0, 30} degrees, 2 s steps.
    pub fn reference(algorithm: Algorithm, horizon_steps: usize, comm_range: f64) -> Self {
        let turn = 30.0 * PI / 180.0;
        Self {
            algorithm,
            horizon_steps,
            epsilon: 1e-4,
            controls: ControlSet { speeds: alloc::vec![20.0, 30.0, 40.0], heading_deltas: alloc::vec![-turn, 0.0, turn] },
            step_dt: 2.0,
            comm_range,
            k_uncertainty: 1.0,
            quad: QuadratureConfig::default(),
        }
    }

    pub fn effective_horizon(&self) -> usize {
        self.horizon_steps.max(1)
    }

    pub fn limits(&self) -> RelayLimits {
        self.controls.limits()
    }

    pub fn candidate_count(&self) -> Option<usize> {
        let mut n: usize = 1;
        for _ in 0..self.effective_horizon() {
            n = n.checked_mul(self.controls.len())?;
        }
        Some(n)
    }

    pub fn validate(&self) -> Result<()> {
        ControlSet::new(self.controls.speeds.clone(), self.controls.heading_deltas.clone())
            .map_err(|e| Error::Config(format!("controls: {e}")))?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.step_dt.is_finite() && self.step_dt > 0.0) {
            return Err(Error::Config("step_dt must be > 0".into()));
        }
        if !(self.comm_range.is_finite() && self.comm_range > 0.0) {
            return Err(Error::Config("comm_range must be > 0".into()));
        }
        if !(self.k_uncertainty.is_finite() && self.k_uncertainty >= 0.0) {
            return Err(Error::Config("k_uncertainty must be >= 0".into()));
        }
        self.quad.validate().map_err(|e| Error::Config(format!("quadrature: {e}")))?;
        match self.candidate_count() {
            Some(n) if n <= MAX_CANDIDATES => Ok(()),
            _ => Err(Error::Config(format!(
                "{} controls over {} steps exceeds {MAX_CANDIDATES} candidate sequences",
                self.controls.len(),
                self.effective_horizon()
            ))),
        }
    }
}

/// What the relay believes about one tracker at planning time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerEstimate {
    pub position: Point,
    pub velocity: Point,
    /// Seconds since the estimate was last refreshed by a measurement.
    pub age: f64,
}

impl TrackerEstimate {
    /// Constant-velocity extrapolation `ahead` seconds into the future.
    pub fn forecast(&self, ahead: f64, k_uncertainty: f64) -> UncertaintyDisk {
        UncertaintyDisk::from_speed(
            self.position + self.velocity * ahead,
            self.velocity.norm(),
            self.age + ahead,
            k_uncertainty,
        )
    }
}

/// Trackers split for the multi-hop heuristics: the one farthest from the
/// others (largest summed distance, lowest index on ties) and the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub outlier: usize,
    pub rest: Vec<usize>,
}

impl Partition {
    pub fn from_positions(positions: &[Point]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("partition needs at least one tracker"));
        }
        let spread = |i: usize| positions.iter().map(|q| positions[i].distance(*q)).sum::<f64>();
        let mut outlier = 0;
        let mut best = spread(0);
        for i in 1..positions.len() {
            let s = spread(i);
            if s > best {
                best = s;
                outlier = i;
            }
        }
        let rest = (0..positions.len()).filter(|&i| i != outlier).collect();
        Ok(Self { outlier, rest })
    }
}

/// Everything an objective needs about the trackers over one horizon.
#[derive(Debug, Clone)]
pub struct HorizonContext {
    /// `disks[j]` holds the forecasts `(j + 1) * step_dt` ahead.
    pub disks: Vec<Vec<UncertaintyDisk>>,
    pub partition: Partition,
    /// Centroid of the current estimated positions.
    pub centroid: Point,
    /// Tracker-to-tracker link probabilities per step, table order.
    tracker_links: Vec<Vec<f64>>,
}

impl HorizonContext {
    pub fn new(estimates: &[TrackerEstimate], cfg: &PlannerConfig, with_tracker_links: bool) -> Result<Self> {
        if estimates.is_empty() {
            return Err(Error::invalid("planning needs at least one tracker estimate"));
        }
        let positions: Vec<Point> = estimates.iter().map(|e| e.position).collect();
        if positions.iter().any(|p| !p.is_finite()) || estimates.iter().any(|e| !e.velocity.is_finite() || !e.age.is_finite()) {
            return Err(Error::invalid("tracker estimates must be finite"));
        }
        let disks: Vec<Vec<UncertaintyDisk>> = (1..=cfg.effective_horizon())
            .map(|j| {
                let ahead = j as f64 * cfg.step_dt;
                estimates.iter().map(|e| e.forecast(ahead, cfg.k_uncertainty)).collect()
            })
            .collect();
        let mut tracker_links = Vec::new();
        if with_tracker_links {
            for step in &disks {
                let mut links = Vec::new();
                for a in 0..step.len() {
                    for b in (a + 1)..step.len() {
                        links.push(tracker_link_probability(&step[a], &step[b], cfg.comm_range, &cfg.quad)?);
                    }
                }
                tracker_links.push(links);
            }
        }
        Ok(Self {
            disks,
            partition: Partition::from_positions(&positions)?,
            centroid: Point::centroid(&positions).expect("non-empty"),
            tracker_links,
        })
    }

    pub fn horizon(&self) -> usize {
        self.disks.len()
    }

    pub fn trackers(&self) -> usize {
        self.disks[0].len()
    }

    /// Tracker-to-tracker link probabilities at horizon step `j`.
    pub fn tracker_links(&self, j: usize) -> Option<&[f64]> {
        self.tracker_links.get(j).map(|v| v.as_slice())
    }

    fn terminal(&self) -> &[UncertaintyDisk] {
        &self.disks[self.disks.len() - 1]
    }
}

/// Running (`lagrange`) and terminal (`mayer`) parts of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObjectiveValue {
    pub lagrange: f64,
    pub mayer: f64,
}

impl ObjectiveValue {
    pub fn total(&self) -> f64 {
        self.lagrange + self.mayer
    }
}

fn check_states(states: &[RelayState], ctx: &HorizonContext) -> Result<()> {
    if states.len() != ctx.horizon() {
        return Err(Error::invalid(format!(
            "{} candidate states for a {}-step horizon",
            states.len(),
            ctx.horizon()
        )));
    }
    Ok(())
}

fn max_distance(relay: Point, disks: &[UncertaintyDisk]) -> f64 {
    disks.iter().map(|d| relay.distance(d.center)).fold(0.0, f64::max)
}

fn nearest_point_distance(relay: Point, ctx: &HorizonContext) -> f64 {
    let end = ctx.terminal();
    let d_k = relay.distance(end[ctx.partition.outlier].center);
    let d_l = ctx.partition.rest.iter().map(|&i| relay.distance(end[i].center)).fold(f64::INFINITY, f64::min);
    if d_l.is_finite() {
        d_k.max(d_l)
    } else {
        d_k
    }
}

fn midpoint_distance(relay: Point, ctx: &HorizonContext) -> f64 {
    let end = ctx.terminal();
    let d_k = relay.distance(end[ctx.partition.outlier].center);
    let rest: Vec<Point> = ctx.partition.rest.iter().map(|&i| end[i].center).collect();
    match Point::centroid(&rest) {
        Some(mean) => d_k.max(relay.distance(mean)),
        None => d_k,
    }
}

/// Star-topology objective: per-step product of relay link probabilities,
/// minus `epsilon` times the largest relay-to-tracker distance at the
/// horizon end (in units of the communication range).
pub fn objective_single_hop(states: &[RelayState], ctx: &HorizonContext, cfg: &PlannerConfig) -> Result<ObjectiveValue> {
    check_states(states, ctx)?;
    let mut lagrange = 0.0;
    for (state, disks) in states.iter().zip(&ctx.disks) {
        lagrange += single_hop_unchecked(state.position, disks, cfg.comm_range);
    }
    let last = states[states.len() - 1].position;
    let mayer = -cfg.epsilon * max_distance(last, ctx.terminal()) / cfg.comm_range;
    Ok(ObjectiveValue { lagrange, mayer })
}

fn network_lagrange(states: &[RelayState], ctx: &HorizonContext, cfg: &PlannerConfig, table: &EdgeStateTable) -> Result<f64> {
    if ctx.tracker_links.len() != ctx.horizon() {
        return Err(Error::invalid("horizon context was built without tracker links"));
    }
    let mut lagrange = 0.0;
    for (j, state) in states.iter().enumerate() {
        let mut probs: Vec<f64> =
            ctx.disks[j].iter().map(|d| relay_link_probability_unchecked(state.position, d, cfg.comm_range)).collect();
        probs.extend_from_slice(&ctx.tracker_links[j]);
        let edges = EdgeProbabilityVector::new(ctx.trackers() + 1, probs)?;
        lagrange += network_connectivity(&edges, table)?;
    }
    Ok(lagrange)
}

/// Nearest-point objective: per-step network reliability, minus `epsilon`
/// times `max(d_k, d_l)` where `k` is the outlier and `l` the nearest of
/// the remaining trackers at the horizon end.
pub fn objective_nearest_point(
    states: &[RelayState],
    ctx: &HorizonContext,
    cfg: &PlannerConfig,
    table: &EdgeStateTable,
) -> Result<ObjectiveValue> {
    check_states(states, ctx)?;
    let lagrange = network_lagrange(states, ctx, cfg, table)?;
    let last = states[states.len() - 1].position;
    Ok(ObjectiveValue { lagrange, mayer: -cfg.epsilon * nearest_point_distance(last, ctx) / cfg.comm_range })
}

/// Midpoint objective: as nearest-point, with `d_l` replaced by the
/// distance to the centroid of the non-outlier trackers.
pub fn objective_midpoint(
    states: &[RelayState],
    ctx: &HorizonContext,
    cfg: &PlannerConfig,
    table: &EdgeStateTable,
) -> Result<ObjectiveValue> {
    check_states(states, ctx)?;
    let lagrange = network_lagrange(states, ctx, cfg, table)?;
    let last = states[states.len() - 1].position;
    Ok(ObjectiveValue { lagrange, mayer: -cfg.epsilon * midpoint_distance(last, ctx) / cfg.comm_range })
}

/// Centroid pursuit: distance from the horizon end to the current centroid
/// of the estimated tracker positions, in units of the communication range.
pub fn objective_center_of_mass(states: &[RelayState], ctx: &HorizonContext, cfg: &PlannerConfig) -> Result<ObjectiveValue> {
    check_states(states, ctx)?;
    let last = states[states.len() - 1].position;
    Ok(ObjectiveValue { lagrange: 0.0, mayer: -last.distance(ctx.centroid) / cfg.comm_range })
}

/// Scores of one enumerated sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub value: ObjectiveValue,
    /// Smallest per-step running term along the sequence.
    pub min_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanDecision {
    /// Objective that produced the decision; differs from the configured
    /// algorithm only for the hybrid planner.
    pub objective_used: Algorithm,
    /// Index of the chosen sequence in enumeration order.
    pub index: usize,
    pub controls: Vec<ControlInput>,
    pub objective: ObjectiveValue,
    /// Scores of every sequence under `objective_used`, enumeration order.
    pub candidates: Vec<CandidateScore>,
}

impl PlanDecision {
    pub fn first_control(&self) -> ControlInput {
        self.controls[0]
    }
}

/// A configured planner with its reliability table built once.
#[derive(Debug, Clone)]
pub struct Planner {
    cfg: PlannerConfig,
    limits: RelayLimits,
    alphabet: Vec<ControlInput>,
    table: EdgeStateTable,
}

impl Planner {
    pub fn new(cfg: PlannerConfig, trackers: usize) -> Result<Self> {
        cfg.validate()?;
        if trackers == 0 {
            return Err(Error::Config("planner needs at least one tracker".into()));
        }
        let table = EdgeStateTable::new(trackers + 1)?;
        Ok(Self { limits: cfg.limits(), alphabet: cfg.controls.inputs(), table, cfg })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    pub fn table(&self) -> &EdgeStateTable {
        &self.table
    }

    /// Builds the horizon context the configured algorithm needs.
    pub fn context(&self, estimates: &[TrackerEstimate]) -> Result<HorizonContext> {
        if estimates.len() + 1 != self.table.nodes() {
            return Err(Error::invalid(format!(
                "planner built for {} trackers, got {} estimates",
                self.table.nodes() - 1,
                estimates.len()
            )));
        }
        let multi = matches!(self.cfg.algorithm, Algorithm::NearestPoint | Algorithm::Midpoint | Algorithm::Hybrid);
        HorizonContext::new(estimates, &self.cfg, multi)
    }

    /// Picks the best control sequence for the configured algorithm.
    pub fn plan(&self, estimates: &[TrackerEstimate], relay: &RelayState) -> Result<PlanDecision> {
        let ctx = self.context(estimates)?;
        self.plan_with(&ctx, relay)
    }

    pub fn plan_with(&self, ctx: &HorizonContext, relay: &RelayState) -> Result<PlanDecision> {
        if !relay.position.is_finite() || !relay.heading.is_finite() {
            return Err(Error::invalid("relay state must be finite"));
        }
        match self.cfg.algorithm {
            Algorithm::Hybrid => self.plan_hybrid(ctx, relay),
            a => self.search(a, ctx, relay),
        }
    }

    /// Single-hop first; falls back to the midpoint objective unless the best
    /// single-hop sequence keeps the star probability positive at every step.
    pub fn plan_hybrid(&self, ctx: &HorizonContext, relay: &RelayState) -> Result<PlanDecision> {
        let star = self.search(Algorithm::SingleHop, ctx, relay)?;
        if star.candidates[star.index].min_step > 0.0 {
            return Ok(star);
        }
        self.search(Algorithm::Midpoint, ctx, relay)
    }

    /// Greedy pursuit of the current estimated centroid.
    pub fn plan_center_of_mass(&self, ctx: &HorizonContext, relay: &RelayState) -> Result<PlanDecision> {
        self.search(Algorithm::CenterOfMass, ctx, relay)
    }

    /// Exhaustive evaluation of `objective` over all sequences.
    pub fn search(&self, objective: Algorithm, ctx: &HorizonContext, relay: &RelayState) -> Result<PlanDecision> {
        if ctx.horizon() != self.cfg.effective_horizon() {
            return Err(Error::invalid("horizon context does not match the planner horizon"));
        }
        let kernels: Vec<RelayConditioned> = match objective {
            Algorithm::NearestPoint | Algorithm::Midpoint => {
                if ctx.tracker_links.len() != ctx.horizon() {
                    return Err(Error::invalid("horizon context was built without tracker links"));
                }
                ctx.tracker_links.iter().map(|l| self.table.condition_on_tracker_links(l)).collect::<Result<_>>()?
            }
            _ => Vec::new(),
        };
        let range = self.cfg.comm_range;
        let mut relay_probs = alloc::vec![0.0; ctx.trackers()];
        let mut step_value = |j: usize, p: Point| -> f64 {
            match objective {
                Algorithm::SingleHop | Algorithm::Hybrid => single_hop_unchecked(p, &ctx.disks[j], range),
                Algorithm::NearestPoint | Algorithm::Midpoint => {
                    for (slot, d) in relay_probs.iter_mut().zip(&ctx.disks[j]) {
                        *slot = relay_link_probability_unchecked(p, d, range);
                    }
                    kernels[j].connectivity(&relay_probs)
                }
                Algorithm::CenterOfMass => 0.0,
            }
        };
        let eps = self.cfg.epsilon;
        let terminal = |p: Point| -> f64 {
            match objective {
                Algorithm::SingleHop | Algorithm::Hybrid => -eps * max_distance(p, ctx.terminal()) / range,
                Algorithm::NearestPoint => -eps * nearest_point_distance(p, ctx) / range,
                Algorithm::Midpoint => -eps * midpoint_distance(p, ctx) / range,
                Algorithm::CenterOfMass => -p.distance(ctx.centroid) / range,
            }
        };

        let mut candidates = Vec::with_capacity(self.cfg.candidate_count().unwrap_or(0));
        self.descend(relay, 0, ctx.horizon(), 0.0, f64::INFINITY, &mut step_value, &terminal, &mut candidates);

        let mut index = 0;
        let mut best = candidates[0].value.total();
        for (i, c) in candidates.iter().enumerate().skip(1) {
            if c.value.total() > best {
                best = c.value.total();
                index = i;
            }
        }
        let objective_used = if objective == Algorithm::Hybrid { Algorithm::SingleHop } else { objective };
        Ok(PlanDecision {
            objective_used,
            index,
            controls: self.sequence(index),
            objective: candidates[index].value,
            candidates,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        state: &RelayState,
        depth: usize,
        horizon: usize,
        acc: f64,
        min_step: f64,
        step_value: &mut impl FnMut(usize, Point) -> f64,
        terminal: &impl Fn(Point) -> f64,
        out: &mut Vec<CandidateScore>,
    ) {
        for u in &self.alphabet {
            let next = step_unchecked(state, u, self.cfg.step_dt);
            let v = step_value(depth, next.position);
            let (acc, min_step) = (acc + v, min_step.min(v));
            if depth + 1 == horizon {
                out.push(CandidateScore { value: ObjectiveValue { lagrange: acc, mayer: terminal(next.position) }, min_step });
            } else {
                self.descend(&next, depth + 1, horizon, acc, min_step, step_value, terminal, out);
            }
        }
    }

    /// The control sequence with enumeration index `index`.
    pub fn sequence(&self, mut index: usize) -> Vec<ControlInput> {
        let h = self.cfg.effective_horizon();
        let base = self.alphabet.len();
        let mut seq = alloc::vec![self.alphabet[0]; h];
        for slot in seq.iter_mut().rev() {
            *slot = self.alphabet[index % base];
            index /= base;
        }
        seq
    }

    /// Relay states visited by a control sequence, validated against the
    /// speed and turn limits.
    pub fn rollout(&self, relay: &RelayState, controls: &[ControlInput]) -> Result<Vec<RelayState>> {
        let mut state = *relay;
        controls
            .iter()
            .map(|u| {
                state = crate::mobility::step_relay(&state, u, self.cfg.step_dt, &self.limits)?;
                Ok(state)
            })
            .collect()
    }
}
