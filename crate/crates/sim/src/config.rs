//! JSON scenario configuration.
//!
//! Field names carry their units. Unknown fields are rejected and nothing
//! is defaulted, so a config file fully determines a run.

use std::f64::consts::PI;
use std::path::Path;

use relay_core::geometry::QuadratureConfig;
use relay_core::mobility::ControlSet;
use relay_core::planner::{Algorithm, PlannerConfig};
use relay_core::estimator::FilterConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedClass {
    Slow,
    Normal,
    Fast,
    /// Every tracker draws from {25, 30, 35} m/s.
    Mixed,
}

impl SpeedClass {
    pub fn speeds(self) -> &'static [f64] {
        match self {
            SpeedClass::Slow => &[25.0],
            SpeedClass::Normal => &[30.0],
            SpeedClass::Fast => &[35.0],
            SpeedClass::Mixed => &[25.0, 30.0, 35.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    SingleHop,
    NearestPoint,
    Midpoint,
    Hybrid,
    CenterOfMass,
}

impl From<AlgorithmName> for Algorithm {
    fn from(a: AlgorithmName) -> Self {
        match a {
            AlgorithmName::SingleHop => Algorithm::SingleHop,
            AlgorithmName::NearestPoint => Algorithm::NearestPoint,
            AlgorithmName::Midpoint => Algorithm::Midpoint,
            AlgorithmName::Hybrid => Algorithm::Hybrid,
            AlgorithmName::CenterOfMass => Algorithm::CenterOfMass,
        }
    }
}

impl From<Algorithm> for AlgorithmName {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::SingleHop => AlgorithmName::SingleHop,
            Algorithm::NearestPoint => AlgorithmName::NearestPoint,
            Algorithm::Midpoint => AlgorithmName::Midpoint,
            Algorithm::Hybrid => AlgorithmName::Hybrid,
            Algorithm::CenterOfMass => AlgorithmName::CenterOfMass,
        }
    }
}

/// When the relay re-solves its planning problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replan {
    EveryStep,
    /// Only when fresh estimates arrive; the stored sequence is flown in
    /// between and its last control held once it runs out.
    RefreshOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    pub algorithm: AlgorithmName,
    pub horizon_steps: usize,
    pub epsilon: f64,
    pub speed_set_mps: Vec<f64>,
    pub delta_set_deg: Vec<f64>,
    pub k_uncertainty: f64,
    pub quad_tol: f64,
    pub replan: Replan,
}

/// Per-axis standard deviations for the horizontal filter model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub sigma_acc_mps2: f64,
    pub sigma_gps_m: f64,
    pub sigma_vel_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_trackers: usize,
    pub initial_positions_m: Vec<[f64; 2]>,
    pub speed_class: SpeedClass,
    pub sim_duration_s: f64,
    pub step_dt_s: f64,
    pub estimate_period_s: f64,
    pub comm_range_m: f64,
    pub seed: u64,
    pub maneuver_period_s: f64,
    /// Largest heading change at a maneuver; 180 makes every new heading
    /// uniform on the circle.
    pub maneuver_turn_max_deg: f64,
    pub planner: PlannerSection,
    pub noise: NoiseSection,
}

/// Reference scenario: three trackers, 171 min at 2 s steps, estimates every
/// 30 s, 100 km range, maneuvers turning at most 45 degrees, midpoint
/// planner without lookahead.
pub fn default_preset() -> ScenarioConfig {
    ScenarioConfig {
        n_trackers: 3,
        initial_positions_m: vec![[0.0, 0.0], [500.0, 500.0], [1000.0, 0.0]],
        speed_class: SpeedClass::Mixed,
        sim_duration_s: 171.0 * 60.0,
        step_dt_s: 2.0,
        estimate_period_s: 30.0,
        comm_range_m: 100_000.0,
        seed: 1,
        maneuver_period_s: 300.0,
        maneuver_turn_max_deg: 45.0,
        planner: PlannerSection {
            algorithm: AlgorithmName::Midpoint,
            horizon_steps: 1,
            epsilon: 1e-4,
            speed_set_mps: vec![20.0, 30.0, 40.0],
            delta_set_deg: vec![-30.0, 0.0, 30.0],
            k_uncertainty: 1.0,
            quad_tol: 1e-8,
            replan: Replan::EveryStep,
        },
        noise: NoiseSection { sigma_acc_mps2: 0.3, sigma_gps_m: 3.0, sigma_vel_mps: 0.3 },
    }
}

/// Communication ranges of the reference sweep, metres.
pub const DEFAULT_RANGES_M: [f64; 4] = [50_000.0, 100_000.0, 150_000.0, 200_000.0];

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::config(field, format!("must be a positive finite number, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(SimError::config(field, format!("must be a non-negative finite number, got {v}")))
    }
}

/// `a / b` as an integer when it is one, up to rounding in the inputs.
fn whole_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() <= 1e-9 * n.max(1.0) && n >= 1.0).then_some(n as usize)
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Read { path: path.into(), source })?;
        let cfg = Self::from_json(&text).map_err(|source| SimError::Parse { path: path.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trackers == 0 {
            return Err(SimError::config("n_trackers", "must be at least 1"));
        }
        if self.n_trackers + 1 > relay_core::connectivity::MAX_NODES {
            return Err(SimError::config(
                "n_trackers",
                format!("at most {} trackers are supported", relay_core::connectivity::MAX_NODES - 1),
            ));
        }
        if self.initial_positions_m.len() != self.n_trackers {
            return Err(SimError::config(
                "initial_positions_m",
                format!("has {} entries for {} trackers", self.initial_positions_m.len(), self.n_trackers),
            ));
        }
        if self.initial_positions_m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SimError::config("initial_positions_m", "coordinates must be finite"));
        }
        positive("sim_duration_s", self.sim_duration_s)?;
        positive("step_dt_s", self.step_dt_s)?;
        positive("estimate_period_s", self.estimate_period_s)?;
        positive("comm_range_m", self.comm_range_m)?;
        positive("maneuver_period_s", self.maneuver_period_s)?;
        if !(self.maneuver_turn_max_deg >= 0.0 && self.maneuver_turn_max_deg <= 180.0) {
            return Err(SimError::config("maneuver_turn_max_deg", "must lie in [0, 180]"));
        }
        if whole_ratio(self.estimate_period_s, self.step_dt_s).is_none() {
            return Err(SimError::config("estimate_period_s", "must be a whole multiple of step_dt_s"));
        }
        if whole_ratio(self.sim_duration_s, self.step_dt_s).is_none() {
            return Err(SimError::config("sim_duration_s", "must be a whole multiple of step_dt_s"));
        }
        let n = &self.noise;
        non_negative("noise.sigma_gps_m", n.sigma_gps_m)?;
        non_negative("noise.sigma_acc_mps2", n.sigma_acc_mps2)?;
        non_negative("noise.sigma_vel_mps", n.sigma_vel_mps)?;
        let p = &self.planner;
        if p.speed_set_mps.is_empty() {
            return Err(SimError::config("planner.speed_set_mps", "must not be empty"));
        }
        if p.speed_set_mps.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SimError::config("planner.speed_set_mps", "speeds must be finite and non-negative"));
        }
        if p.delta_set_deg.is_empty() {
            return Err(SimError::config("planner.delta_set_deg", "must not be empty"));
        }
        if p.delta_set_deg.iter().any(|v| !(v.is_finite() && v.abs() <= 180.0)) {
            return Err(SimError::config("planner.delta_set_deg", "turns must lie in [-180, 180] degrees"));
        }
        if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
            return Err(SimError::config("planner.epsilon", format!("must lie in (0, 1), got {}", p.epsilon)));
        }
        non_negative("planner.k_uncertainty", p.k_uncertainty)?;
        if !(p.quad_tol > 0.0 && p.quad_tol < 1.0) {
            return Err(SimError::config("planner.quad_tol", format!("must lie in (0, 1), got {}", p.quad_tol)));
        }
        self.planner_config()
            .validate()
            .map_err(|e| SimError::config("planner", e.to_string()))?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        whole_ratio(self.sim_duration_s, self.step_dt_s).unwrap_or(0)
    }

    pub fn steps_per_estimate(&self) -> usize {
        whole_ratio(self.estimate_period_s, self.step_dt_s).unwrap_or(1)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.planner.algorithm.into()
    }

    pub fn planner_config(&self) -> PlannerConfig {
        let p = &self.planner;
        PlannerConfig {
            algorithm: p.algorithm.into(),
            horizon_steps: p.horizon_steps,
            epsilon: p.epsilon,
            controls: ControlSet {
                speeds: p.speed_set_mps.clone(),
                heading_deltas: p.delta_set_deg.iter().map(|d| d * PI / 180.0).collect(),
            },
            step_dt: self.step_dt_s,
            comm_range: self.comm_range_m,
            k_uncertainty: p.k_uncertainty,
            quad: QuadratureConfig::with_tolerance(p.quad_tol),
        }
    }

    /// Filter model at the simulation step.
    pub fn filter_config(&self) -> FilterConfig {
        let n = &self.noise;
        FilterConfig::planar(self.step_dt_s, n.sigma_acc_mps2, n.sigma_gps_m, n.sigma_vel_mps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_matches_reference_timing() {
        let p = default_preset();
        assert_eq!(p.sim_duration_s / 60.0, 171.0);
        assert_eq!(p.step_dt_s, 2.0);
        assert_eq!(p.estimate_period_s, 30.0);
        assert_eq!(p.steps(), 5130);
        assert_eq!(p.steps_per_estimate(), 15);
        p.validate().unwrap();
    }

    #[test]
    fn unknown_field_rejected() {
        let mut v = serde_json::to_value(default_preset()).unwrap();
        v["planner"]["extra"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ScenarioConfig>(v).is_err());
        let mut v = serde_json::to_value(default_preset()).unwrap();
        v.as_object_mut().unwrap().remove("seed");
        assert!(serde_json::from_value::<ScenarioConfig>(v).is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = default_preset();
        c.estimate_period_s = 31.0;
        match c.validate() {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "estimate_period_s"),
            other => panic!("{other:?}"),
        }
        let mut c = default_preset();
        c.initial_positions_m.pop();
        match c.validate() {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "initial_positions_m"),
            other => panic!("{other:?}"),
        }
        let mut c = default_preset();
        c.planner.horizon_steps = 9;
        match c.validate() {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "planner"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let c = default_preset();
        assert_eq!(ScenarioConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn speed_classes() {
        assert_eq!(SpeedClass::Slow.speeds(), &[25.0]);
        assert_eq!(SpeedClass::Mixed.speeds(), &[25.0, 30.0, 35.0]);
        let s: SpeedClass = serde_json::from_str("\"fast\"").unwrap();
        assert_eq!(s, SpeedClass::Fast);
    }
}
