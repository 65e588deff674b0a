//! Relay-UAV trajectory planning primitives.
//!
//! A relay drone keeps a fleet of tracker drones connected under a disk
//! communication model. This crate holds the pure algorithmic pieces:
//!
//! * [`geometry`]: lens areas, the uniform-disk distance density, the
//!   averaged lens integral and minimum enclosing circles.
//! * [`estimator`]: the constant-velocity Kalman filter the relay runs per
//!   tracker.
//! * [`mobility`]: relay kinematics, control-set enumeration and piecewise
//!   constant-velocity tracker plans.
//! * [`connectivity`]: link probabilities under position uncertainty and
//!   exact all-terminal reliability by edge-state enumeration.
//! * [`planner`]: receding-horizon exhaustive search over control sequences.
//! * [`feasibility`]: the geometric oracle bounding achievable lifetime.
//!
//! The crate is `no_std` and needs only `alloc`. IO, configuration files,
//! random scenario generation and the simulation loop live in `relay-sim`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod connectivity;
pub mod error;
pub mod estimator;
pub mod feasibility;
pub mod geometry;
pub mod mobility;
pub mod planner;

mod dsu;

pub use error::{Error, Result};
pub use geometry::Point;
