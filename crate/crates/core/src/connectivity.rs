//! Link probabilities under position uncertainty, exact all-terminal
//! reliability over independent links, and the hard disk-model check used
//! for scoring.
//!
//! Network node `0` is always the relay; trackers are nodes `1..=N`. Edges
//! are ordered lexicographically by `(i, j)` with `i < j`, so the first `N`
//! edges are the relay links.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dsu::DisjointSet;
use crate::geometry::{self, average_lens_area, lens_area_unchecked, Point, QuadratureConfig};
use crate::{Error, Result};

/// Floor on the uncertainty radius so link ratios stay defined.
pub const MIN_UNCERTAINTY_RADIUS: f64 = 1.0;

/// Largest node count for exact enumeration (`2^15` edge states).
pub const MAX_NODES: usize = 6;

/// Region a tracker is believed to occupy: uniform over a disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyDisk {
    pub center: Point,
    pub radius: f64,
}

impl UncertaintyDisk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("uncertainty center must be finite"));
        }
        geometry::check_positive("uncertainty radius", radius)?;
        Ok(Self { center, radius })
    }

    /// Radius `k * speed * elapsed`, floored at [`MIN_UNCERTAINTY_RADIUS`].
    pub fn from_speed(center: Point, speed: f64, elapsed: f64, k: f64) -> Self {
        let radius = (k * speed * elapsed).max(MIN_UNCERTAINTY_RADIUS);
        let radius = if radius.is_finite() { radius } else { MIN_UNCERTAINTY_RADIUS };
        Self { center, radius }
    }
}

/// Probability that a tracker uniformly placed in `disk` is within `range`
/// of the relay.
pub fn relay_link_probability(relay: Point, disk: &UncertaintyDisk, range: f64) -> Result<f64> {
    geometry::check_positive("range", range)?;
    if !relay.is_finite() {
        return Err(Error::invalid("relay position must be finite"));
    }
    UncertaintyDisk::new(disk.center, disk.radius)?;
    Ok(relay_link_probability_unchecked(relay, disk, range))
}

#[inline]
pub(crate) fn relay_link_probability_unchecked(relay: Point, disk: &UncertaintyDisk, range: f64) -> f64 {
    let d = relay.distance(disk.center);
    if d >= range + disk.radius {
        return 0.0;
    }
    (lens_area_unchecked(range, disk.radius, d) / (PI * disk.radius * disk.radius)).clamp(0.0, 1.0)
}

/// Averaged-lens link probability normalised by the area of `disk_i`.
pub fn oriented_tracker_link_probability(
    disk_i: &UncertaintyDisk,
    disk_j: &UncertaintyDisk,
    range: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let d = disk_i.center.distance(disk_j.center);
    let area = average_lens_area(range, disk_i.radius, d, disk_j.radius, quad)?;
    Ok((area / (PI * disk_i.radius * disk_i.radius)).clamp(0.0, 1.0))
}

/// Probability that two uncertain trackers are within `range` of each
/// other, symmetrised over both orientations of the averaged-lens integral.
pub fn tracker_link_probability(
    disk_i: &UncertaintyDisk,
    disk_j: &UncertaintyDisk,
    range: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let ij = oriented_tracker_link_probability(disk_i, disk_j, range, quad)?;
    let ji = oriented_tracker_link_probability(disk_j, disk_i, range, quad)?;
    Ok(0.5 * (ij + ji))
}

/// Probability that every tracker links directly to the relay, assuming
/// independent links.
pub fn single_hop_connectivity(relay: Point, disks: &[UncertaintyDisk], range: f64) -> Result<f64> {
    if disks.is_empty() {
        return Err(Error::invalid("single-hop connectivity needs at least one tracker"));
    }
    disks.iter().try_fold(1.0, |acc, d| Ok(acc * relay_link_probability(relay, d, range)?))
}

pub(crate) fn single_hop_unchecked(relay: Point, disks: &[UncertaintyDisk], range: f64) -> f64 {
    disks.iter().fold(1.0, |acc, d| acc * relay_link_probability_unchecked(relay, d, range))
}

pub fn edge_count(nodes: usize) -> usize {
    nodes * nodes.saturating_sub(1) / 2
}

/// Index of edge `(i, j)` in the lexicographic edge order.
pub fn edge_index(nodes: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < nodes && i != j);
    i * (2 * nodes - i - 1) / 2 + (j - i - 1)
}

/// Link probabilities for every node pair, in lexicographic edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilityVector {
    nodes: usize,
    probs: Vec<f64>,
}

impl EdgeProbabilityVector {
    pub fn new(nodes: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != edge_count(nodes) {
            return Err(Error::invalid(format!(
                "{nodes} nodes need {} edge probabilities, got {}",
                edge_count(nodes),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::invalid("edge probabilities must lie in [0, 1]"));
        }
        Ok(Self { nodes, probs })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[edge_index(self.nodes, i, j)]
    }
}

/// Every edge-presence configuration of a `nodes`-vertex graph with a
/// precomputed connectedness flag. Row `m` has edge `e` present iff bit `e`
/// of `m` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStateTable {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    connected: Vec<bool>,
}

impl EdgeStateTable {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes == 0 || nodes > MAX_NODES {
            return Err(Error::Config(format!("exact reliability supports 1..={MAX_NODES} nodes, got {nodes}")));
        }
        let edges: Vec<(usize, usize)> =
            (0..nodes).flat_map(|i| ((i + 1)..nodes).map(move |j| (i, j))).collect();
        let rows = 1usize << edges.len();
        let connected = (0..rows)
            .map(|mask| {
                let mut dsu = DisjointSet::new(nodes);
                for (e, &(i, j)) in edges.iter().enumerate() {
                    if mask >> e & 1 == 1 {
                        dsu.union(i, j);
                    }
                }
                dsu.components() == 1
            })
            .collect();
        Ok(Self { nodes, edges, connected })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn rows(&self) -> usize {
        self.connected.len()
    }

    pub fn is_connected(&self, row: usize) -> bool {
        self.connected[row]
    }

    /// Pre-sums the table over the tracker-to-tracker edges, leaving a
    /// function of the relay links alone.
    ///
    /// `tracker_probs` lists the probabilities of the edges not touching
    /// node 0, in table order.
    pub fn condition_on_tracker_links(&self, tracker_probs: &[f64]) -> Result<RelayConditioned> {
        let relay_edges = self.nodes - 1;
        if tracker_probs.len() != self.edges.len() - relay_edges {
            return Err(Error::invalid("tracker edge probability count does not match the table"));
        }
        let mut by_mask = alloc::vec![0.0; 1 << relay_edges];
        let relay_bits = (1usize << relay_edges) - 1;
        for (row, &ok) in self.connected.iter().enumerate() {
            if !ok {
                continue;
            }
            let weight = tracker_probs.iter().enumerate().fold(1.0, |acc, (k, &p)| {
                if row >> (relay_edges + k) & 1 == 1 {
                    acc * p
                } else {
                    acc * (1.0 - p)
                }
            });
            by_mask[row & relay_bits] += weight;
        }
        Ok(RelayConditioned { relay_edges, by_mask })
    }
}

/// Network reliability with the tracker-to-tracker links summed out.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayConditioned {
    relay_edges: usize,
    by_mask: Vec<f64>,
}

impl RelayConditioned {
    /// `relay_probs[i]` is the relay's link probability to tracker `i + 1`.
    pub fn connectivity(&self, relay_probs: &[f64]) -> f64 {
        debug_assert_eq!(relay_probs.len(), self.relay_edges);
        let mut total = 0.0;
        for (mask, &w) in self.by_mask.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut term = w;
            for (k, &p) in relay_probs.iter().enumerate() {
                term *= if mask >> k & 1 == 1 { p } else { 1.0 - p };
            }
            total += term;
        }
        total.clamp(0.0, 1.0)
    }
}

/// Probability that the random graph with independent edge probabilities
/// is connected, by summing over every connected edge state.
pub fn network_connectivity(edges: &EdgeProbabilityVector, table: &EdgeStateTable) -> Result<f64> {
    if edges.nodes != table.nodes {
        return Err(Error::invalid(format!(
            "edge vector has {} nodes, table has {}",
            edges.nodes, table.nodes
        )));
    }
    let mut total = 0.0;
    for (row, &ok) in table.connected.iter().enumerate() {
        if !ok {
            continue;
        }
        let term = edges.probs.iter().enumerate().fold(1.0, |acc, (e, &p)| {
            if row >> e & 1 == 1 {
                acc * p
            } else {
                acc * (1.0 - p)
            }
        });
        total += term;
    }
    Ok(total.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnectivityMode {
    /// Every tracker links directly to the relay.
    SingleHop,
    /// The disk graph over relay and trackers is connected.
    MultiHop,
}

/// Deterministic disk-model connectivity on true positions.
pub fn ground_truth_connected(trackers: &[Point], relay: Point, range: f64, mode: ConnectivityMode) -> bool {
    match mode {
        ConnectivityMode::SingleHop => trackers.iter().all(|p| p.distance(relay) <= range),
        ConnectivityMode::MultiHop => {
            let n = trackers.len() + 1;
            let node = |i: usize| if i == 0 { relay } else { trackers[i - 1] };
            let mut dsu = DisjointSet::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if node(i).distance(node(j)) <= range {
                        dsu.union(i, j);
                    }
                }
            }
            dsu.components() == 1
        }
    }
}
