//! Simulation harness, scenario files, batch runs and the command-line front
//! end for relay planning.

pub mod batch;
pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod output;
pub mod rmse;
pub mod scenario;
pub mod sweep;

pub use batch::{aggregate, run_batch, run_one, Aggregate, RunSummary, Stats};
pub use config::{default_preset, ScenarioConfig};
pub use error::{Result, SimError};
pub use harness::{run, score, RunMetrics, SimulationTrace, StepRecord};
pub use rmse::{rmse_study, RmseCurve};
pub use scenario::{materialize, Scenario};
pub use sweep::{run_sweep, SweepSpec};
