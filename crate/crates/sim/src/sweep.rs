//! Sweeps over algorithms x horizons x communication ranges x seeds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::batch::{aggregate, run_batch, Aggregate, RunSummary};
use crate::config::{AlgorithmName, ScenarioConfig};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Every cell starts from this scenario.
    pub base: ScenarioConfig,
    pub algorithms: Vec<AlgorithmName>,
    pub horizons: Vec<usize>,
    pub comm_ranges_m: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub label: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub cells: Vec<(String, std::result::Result<RunSummary, String>)>,
    pub aggregate: Vec<Aggregate>,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|(_, r)| r.is_err()).count()
    }
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Read { path: path.into(), source })?;
        let spec: Self = serde_json::from_str(&text).map_err(|source| SimError::Parse { path: path.into(), source })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, empty) in [
            ("algorithms", self.algorithms.is_empty()),
            ("horizons", self.horizons.is_empty()),
            ("comm_ranges_m", self.comm_ranges_m.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ] {
            if empty {
                return Err(SimError::config(field, "must not be empty"));
            }
        }
        self.base.validate().map_err(|e| match e {
            SimError::Config { field, message } => SimError::config(format!("base.{field}"), message),
            other => other,
        })?;
        for cell in self.cells() {
            cell.config.validate().map_err(|e| SimError::config(cell.label.clone(), e.to_string()))?;
        }
        Ok(())
    }

    /// Cells in algorithm, horizon, range, seed order.
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut out = Vec::new();
        for &alg in &self.algorithms {
            for &horizon in &self.horizons {
                for &range in &self.comm_ranges_m {
                    for &seed in &self.seeds {
                        let mut config = self.base.clone();
                        config.planner.algorithm = alg;
                        config.planner.horizon_steps = horizon;
                        config.comm_range_m = range;
                        config.seed = seed;
                        let label = format!(
                            "{}/F{horizon}/R{range}/s{seed}",
                            relay_core::planner::Algorithm::from(alg).name()
                        );
                        out.push(SweepCell { label, config });
                    }
                }
            }
        }
        out
    }
}

pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepOutcome> {
    let cells = spec.cells();
    let configs: Vec<ScenarioConfig> = cells.iter().map(|c| c.config.clone()).collect();
    let results = run_batch(&configs, jobs)?;
    let cells: Vec<(String, std::result::Result<RunSummary, String>)> = cells
        .into_iter()
        .zip(results)
        .map(|(c, r)| (c.label, r.map_err(|e| e.to_string())))
        .collect();
    let ok: Vec<RunSummary> = cells.iter().filter_map(|(_, r)| r.as_ref().ok().cloned()).collect();
    Ok(SweepOutcome { aggregate: aggregate(&ok), cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_preset;

    fn spec() -> SweepSpec {
        SweepSpec {
            base: default_preset(),
            algorithms: vec![AlgorithmName::SingleHop, AlgorithmName::CenterOfMass],
            horizons: vec![1, 4],
            comm_ranges_m: vec![50_000.0, 100_000.0],
            seeds: vec![1, 2, 3],
        }
    }

    #[test]
    fn cell_enumeration_order_and_count() {
        let cells = spec().cells();
        assert_eq!(cells.len(), 2 * 2 * 2 * 3);
        assert_eq!(cells[0].label, "single_hop/F1/R50000/s1");
        assert_eq!(cells[1].label, "single_hop/F1/R50000/s2");
        assert_eq!(cells[23].label, "center_of_mass/F4/R100000/s3");
    }

    #[test]
    fn empty_lists_rejected_by_name() {
        let mut s = spec();
        s.seeds.clear();
        match s.validate() {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "seeds"),
            other => panic!("{other:?}"),
        }
        let mut s = spec();
        s.base.step_dt_s = 0.0;
        match s.validate() {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "base.step_dt_s"),
            other => panic!("{other:?}"),
        }
    }
}
