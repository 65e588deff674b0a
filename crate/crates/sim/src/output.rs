//! File formats: per-step trace CSV, metrics JSON, RMSE curves and sweep
//! tables.
//!
//! Floats in CSV files are written as `{:.8e}` (nine significant digits).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::batch::{Aggregate, RunSummary};
use crate::error::Result;
use crate::harness::SimulationTrace;
use crate::rmse::{RmseCurve, SteadyState};

/// Version of every JSON document written here.
pub const SCHEMA_VERSION: u32 = 1;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.8e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Trace columns for `n` trackers, in file order.
pub fn trace_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "step",
        "time_s",
        "relay_x_m",
        "relay_y_m",
        "relay_heading_rad",
        "relay_speed_mps",
        "control_speed_mps",
        "control_heading_delta_rad",
        "objective_used",
        "lagrange",
        "mayer",
        "connected_single_hop",
        "connected_multi_hop",
        "feasible_single_hop",
        "feasible_multi_hop",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 0..n {
        for col in ["x_m", "y_m", "vx_mps", "vy_mps", "est_x_m", "est_y_m", "est_vx_mps", "est_vy_mps", "radius_m"] {
            h.push(format!("tracker{i}_{col}"));
        }
    }
    h
}

pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, out: W) -> Result<()> {
    let n = trace.records.first().map_or(0, |r| r.truth.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(n))?;
    for r in &trace.records {
        let mut row = vec![
            r.step.to_string(),
            fmt_f64(r.time),
            fmt_f64(r.relay.position.x),
            fmt_f64(r.relay.position.y),
            fmt_f64(r.relay.heading),
            fmt_f64(r.relay.speed),
            fmt_f64(r.control.speed),
            fmt_f64(r.control.heading_delta),
            r.objective_used.name().to_string(),
            fmt_f64(r.objective.lagrange),
            fmt_f64(r.objective.mayer),
            flag(r.connected_single_hop).into(),
            flag(r.connected_multi_hop).into(),
            flag(r.feasible_single_hop).into(),
            flag(r.feasible_multi_hop).into(),
        ];
        for ((t, e), radius) in r.truth.iter().zip(&r.estimates).zip(&r.radii) {
            row.extend(
                [
                    t.position[0],
                    t.position[1],
                    t.velocity[0],
                    t.velocity[1],
                    e.position.x,
                    e.position.y,
                    e.velocity.x,
                    e.velocity.y,
                    *radius,
                ]
                .map(fmt_f64),
            );
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Versioned { schema_version: SCHEMA_VERSION, body })?;
    s.push('\n');
    Ok(s)
}

pub fn metrics_json(summary: &RunSummary) -> Result<String> {
    to_json(summary)
}

pub fn write_rmse_csv<W: Write>(curve: &RmseCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "time_s", "rmse_position_m", "rmse_velocity_mps"])?;
    for k in 0..curve.time_s.len() {
        w.write_record([
            k.to_string(),
            fmt_f64(curve.time_s[k]),
            fmt_f64(curve.position_m[k]),
            fmt_f64(curve.velocity_mps[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct RmseSummary {
    pub runs: usize,
    pub seed: u64,
    pub burn_in_fraction: f64,
    pub steady_state: SteadyState,
}

/// Relative-connectivity targets for the multi-hop
/// planners; other algorithms have none.
pub fn relative_target(algorithm: &str) -> Option<f64> {
    match algorithm {
        "nearest_point" | "midpoint" => Some(0.90),
        "hybrid" => Some(0.95),
        _ => None,
    }
}

pub fn write_cells_csv<W: Write>(cells: &[(String, std::result::Result<RunSummary, String>)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "cell",
        "status",
        "algorithm",
        "horizon_steps",
        "comm_range_m",
        "seed",
        "scored_mode",
        "connectivity_duration_min",
        "max_lifetime_min",
        "relative_connectivity",
        "rmse_position_m",
        "rmse_velocity_mps",
        "error",
    ])?;
    for (cell, result) in cells {
        match result {
            Ok(s) => {
                let m = &s.metrics;
                w.write_record([
                    cell.clone(),
                    "ok".into(),
                    s.algorithm.into(),
                    s.horizon_steps.to_string(),
                    fmt_f64(s.comm_range_m),
                    s.seed.to_string(),
                    s.scored_mode.into(),
                    fmt_f64(m.connectivity_duration_min),
                    fmt_f64(m.max_lifetime_min),
                    fmt_f64(m.relative_connectivity),
                    fmt_f64(m.rmse_position_m),
                    fmt_f64(m.rmse_velocity_mps),
                    String::new(),
                ])?;
            }
            Err(e) => {
                let mut row = vec![cell.clone(), "failed".to_string()];
                row.extend(std::iter::repeat_n(String::new(), 10));
                row.push(e.clone());
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(rows: &[Aggregate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["algorithm", "horizon_steps", "comm_range_m", "scored_mode", "runs"];
    let stats = ["mean", "min", "q1", "median", "q3", "max"];
    let mut cols = Vec::new();
    for metric in ["connectivity_duration_min", "max_lifetime_min", "relative_connectivity"] {
        for s in stats {
            cols.push(format!("{metric}_{s}"));
        }
    }
    header.extend(cols.iter().map(String::as_str));
    header.push("relative_target");
    w.write_record(&header)?;
    for a in rows {
        let mut row = vec![
            a.algorithm.to_string(),
            a.horizon_steps.to_string(),
            fmt_f64(a.comm_range_m),
            a.scored_mode.to_string(),
            a.connectivity_duration_min.n.to_string(),
        ];
        for s in [&a.connectivity_duration_min, &a.max_lifetime_min, &a.relative_connectivity] {
            row.extend([s.mean, s.min, s.q1, s.median, s.q3, s.max].map(fmt_f64));
        }
        row.push(relative_target(a.algorithm).map(fmt_f64).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f64(123456.789012), "1.23456789e5");
        assert_eq!(fmt_f64(0.0), "0.00000000e0");
        assert_eq!(fmt_f64(-2.5e-7), "-2.50000000e-7");
    }

    #[test]
    fn header_layout() {
        let h = trace_header(2);
        assert_eq!(h.len(), 15 + 18);
        assert_eq!(h[0], "step");
        assert_eq!(h[15], "tracker0_x_m");
        assert_eq!(h[32], "tracker1_radius_m");
    }

    #[test]
    fn json_carries_schema_version() {
        #[derive(Serialize)]
        struct Body {
            x: u8,
        }
        let s = to_json(&Body { x: 3 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["x"], 3);
    }
}
