//! Geometric upper bound on network lifetime: given exact tracker
//! positions, can any relay placement connect the fleet?
//!
//! Threshold comparisons are closed and carry a relative slack of
//! [`BOUNDARY_TOL`], so configurations exactly on a boundary count as
//! feasible.

use alloc::vec::Vec;

use crate::connectivity::ConnectivityMode;
use crate::dsu::DisjointSet;
use crate::geometry::{self, min_enclosing_circle, Point};
use crate::{Error, Result};

pub const BOUNDARY_TOL: f64 = 1e-9;

const MEC_SEED: u64 = 0x5eed_c1c1e;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityVerdict {
    pub single_hop_feasible: bool,
    pub multi_hop_feasible: bool,
    pub single_hop_witness: Option<Point>,
    pub multi_hop_witness: Option<Point>,
}

impl FeasibilityVerdict {
    pub fn evaluate(positions: &[Point], range: f64) -> Result<Self> {
        let single = single_hop_feasible(positions, range)?;
        // A star placement also connects the multi-hop graph.
        let multi = match single {
            Some(w) => Some(w),
            None => multi_hop_feasible(positions, range)?,
        };
        Ok(Self {
            single_hop_feasible: single.is_some(),
            multi_hop_feasible: multi.is_some(),
            single_hop_witness: single,
            multi_hop_witness: multi,
        })
    }

    pub fn feasible(&self, mode: ConnectivityMode) -> bool {
        match mode {
            ConnectivityMode::SingleHop => self.single_hop_feasible,
            ConnectivityMode::MultiHop => self.multi_hop_feasible,
        }
    }

    pub fn witness(&self, mode: ConnectivityMode) -> Option<Point> {
        match mode {
            ConnectivityMode::SingleHop => self.single_hop_witness,
            ConnectivityMode::MultiHop => self.multi_hop_witness,
        }
    }
}

fn check(positions: &[Point], range: f64) -> Result<f64> {
    geometry::check_positive("range", range)?;
    if positions.is_empty() {
        return Err(Error::invalid("feasibility needs at least one tracker"));
    }
    if positions.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("tracker positions must be finite"));
    }
    Ok(range * (1.0 + BOUNDARY_TOL))
}

/// Some point within `range` of every tracker exists iff the minimum
/// enclosing circle of the trackers has radius at most `range`. Returns the
/// circle's center as witness.
pub fn single_hop_feasible(positions: &[Point], range: f64) -> Result<Option<Point>> {
    let slack = check(positions, range)?;
    let mec = min_enclosing_circle(positions, MEC_SEED)?;
    Ok((mec.radius <= slack).then_some(mec.center))
}

/// Multi-hop feasibility. Three trackers use the sorted-distance casework;
/// other counts use [`multi_hop_feasible_generic`].
pub fn multi_hop_feasible(positions: &[Point], range: f64) -> Result<Option<Point>> {
    if positions.len() == 3 {
        multi_hop_feasible_three([positions[0], positions[1], positions[2]], range)
    } else {
        multi_hop_feasible_generic(positions, range)
    }
}

/// Casework for three trackers by how many tracker-to-tracker links exist:
/// two or more are already connected; exactly one needs the isolated
/// tracker within `2 * range` of the linked pair; none reduces to the
/// single-hop test.
pub fn multi_hop_feasible_three(p: [Point; 3], range: f64) -> Result<Option<Point>> {
    let slack = check(&p, range)?;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let linked: Vec<(usize, usize)> = pairs.into_iter().filter(|&(a, b)| p[a].distance(p[b]) <= slack).collect();
    match linked.len() {
        0 => single_hop_feasible(&p, range),
        1 => {
            let (a, b) = linked[0];
            let c = 3 - a - b;
            let near = if p[a].distance(p[c]) <= p[b].distance(p[c]) { a } else { b };
            Ok((p[near].distance(p[c]) <= 2.0 * slack).then(|| p[near].midpoint(p[c])))
        }
        _ => Ok(Some(p[0])),
    }
}

/// Components of the tracker disk graph; feasible iff some point lies
/// within `range` of at least one member of every component. The feasible
/// set is an intersection of unions of disks, so if it is non-empty it
/// contains a disk center or a pairwise circle intersection point; those
/// candidates are tested exhaustively.
pub fn multi_hop_feasible_generic(positions: &[Point], range: f64) -> Result<Option<Point>> {
    let slack = check(positions, range)?;
    let n = positions.len();
    let mut dsu = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if positions[i].distance(positions[j]) <= slack {
                dsu.union(i, j);
            }
        }
    }
    if dsu.components() == 1 {
        return Ok(Some(positions[0]));
    }
    let mut roots: Vec<usize> = (0..n).map(|i| dsu.find(i)).collect();
    let labels = roots.clone();
    roots.sort_unstable();
    roots.dedup();
    let members: Vec<Vec<Point>> = roots
        .iter()
        .map(|&r| (0..n).filter(|&i| labels[i] == r).map(|i| positions[i]).collect())
        .collect();
    let covers = |q: Point| members.iter().all(|m| m.iter().any(|p| p.distance(q) <= slack));

    if let Some(&c) = positions.iter().find(|&&c| covers(c)) {
        return Ok(Some(c));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for q in circle_intersections(positions[i], positions[j], range, slack) {
                if covers(q) {
                    return Ok(Some(q));
                }
            }
        }
    }
    Ok(None)
}

/// Intersection points of two radius-`range` circles; tangency within the
/// slack yields the midpoint twice.
fn circle_intersections(a: Point, b: Point, range: f64, slack: f64) -> [Point; 2] {
    let d = a.distance(b);
    if d == 0.0 || d > 2.0 * slack {
        return [Point::new(f64::NAN, f64::NAN); 2];
    }
    let mid = a.midpoint(b);
    let h = libm::sqrt((range * range - 0.25 * d * d).max(0.0));
    let perp = Point::new(-(b.y - a.y) / d, (b.x - a.x) / d);
    [mid + perp * h, mid - perp * h]
}

/// Maximum achievable connected time over a trace of tracker positions:
/// feasible steps times `step_dt`.
pub fn max_lifetime(trace: &[Vec<Point>], range: f64, mode: ConnectivityMode, step_dt: f64) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::invalid("empty trace"));
    }
    geometry::check_positive("step_dt", step_dt)?;
    let mut feasible = 0usize;
    for positions in trace {
        let ok = match mode {
            ConnectivityMode::SingleHop => single_hop_feasible(positions, range)?.is_some(),
            ConnectivityMode::MultiHop => {
                single_hop_feasible(positions, range)?.is_some() || multi_hop_feasible(positions, range)?.is_some()
            }
        };
        feasible += ok as usize;
    }
    Ok(feasible as f64 * step_dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn triangle(d12: f64, d13: f64, d23: f64) -> [Point; 3] {
        // Place 1 at the origin, 2 on the x-axis, 3 by the law of cosines.
        let x = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
        let y = libm::sqrt((d13 * d13 - x * x).max(0.0));
        [Point::ORIGIN, Point::new(d12, 0.0), Point::new(x, y)]
    }

    #[test]
    fn single_tracker_always_feasible() {
        let p = [Point::new(5.0, 5.0)];
        assert_eq!(single_hop_feasible(&p, 1.0).unwrap(), Some(p[0]));
        assert!(multi_hop_feasible(&p, 1.0).unwrap().is_some());
    }

    #[test]
    fn equilateral_threshold() {
        let s = 300.0;
        let p = triangle(s, s, s);
        let circum = s / libm::sqrt(3.0);
        assert!(single_hop_feasible(&p, circum * 1.001).unwrap().is_some());
        assert!(single_hop_feasible(&p, circum * 0.999).unwrap().is_none());
    }

    #[test]
    fn casework_examples() {
        let r = 1000.0;
        assert!(multi_hop_feasible_three(triangle(0.5 * r, 0.5 * r, 0.5 * r), r).unwrap().is_some());
        assert!(multi_hop_feasible_three(triangle(0.8 * r, 1.5 * r, 2.1 * r), r).unwrap().is_some());
        assert!(multi_hop_feasible_three(triangle(0.8 * r, 2.5 * r, 2.6 * r), r).unwrap().is_none());
        assert!(multi_hop_feasible_generic(&triangle(0.8 * r, 2.5 * r, 2.6 * r), r).unwrap().is_none());
        assert!(multi_hop_feasible_generic(&triangle(0.8 * r, 1.5 * r, 2.1 * r), r).unwrap().is_some());
    }

    #[test]
    fn boundary_counts_as_feasible() {
        let r = 10.0;
        let p = [Point::ORIGIN, Point::new(2.0 * r, 0.0)];
        assert_eq!(single_hop_feasible(&p, r).unwrap(), Some(Point::new(r, 0.0)));
    }

    #[test]
    fn verdict_implication() {
        let v = FeasibilityVerdict::evaluate(&triangle(900.0, 1500.0, 2100.0), 1000.0).unwrap();
        assert!(!v.single_hop_feasible);
        assert!(v.multi_hop_feasible && v.multi_hop_witness.is_some());
    }

    #[test]
    fn lifetime_counts_feasible_steps() {
        let trace = vec![vec![Point::ORIGIN, Point::new(1.0, 0.0)]; 10];
        assert_eq!(max_lifetime(&trace, 5.0, ConnectivityMode::SingleHop, 2.0).unwrap(), 20.0);
        assert!(max_lifetime(&[], 5.0, ConnectivityMode::SingleHop, 2.0).is_err());
    }
}
