mod common;

use common::{bfs_connected, bfs_with, halton, in_disk, random_disk_point, rng};
use proptest::prelude::*;
use rand::Rng;
use relay_core::connectivity::{
    edge_count, edge_index, ground_truth_connected, network_connectivity, relay_link_probability,
    single_hop_connectivity, tracker_link_probability, ConnectivityMode, EdgeProbabilityVector, EdgeStateTable,
    UncertaintyDisk,
};
use relay_core::geometry::QuadratureConfig;
use relay_core::Point;

fn disk(x: f64, y: f64, r: f64) -> UncertaintyDisk {
    UncertaintyDisk::new(Point::new(x, y), r).unwrap()
}

fn relay_link_by_sampling(relay: Point, d: &UncertaintyDisk, range: f64, n: u64) -> f64 {
    let hits = (1..=n).filter(|&k| in_disk(d.center, d.radius, halton(k, 2), halton(k, 3)).distance(relay) <= range);
    hits.count() as f64 / n as f64
}

fn tracker_link_by_sampling(a: &UncertaintyDisk, b: &UncertaintyDisk, range: f64, n: u64) -> f64 {
    let mut r = rng(99);
    let hits = (0..n).filter(|_| {
        random_disk_point(&mut r, a.center, a.radius).distance(random_disk_point(&mut r, b.center, b.radius)) <= range
    });
    hits.count() as f64 / n as f64
}

#[test]
fn relay_link_matches_sampling() {
    let p = relay_link_probability(Point::ORIGIN, &disk(10.0, 0.0, 2.0), 10.0).unwrap();
    let s = relay_link_by_sampling(Point::ORIGIN, &disk(10.0, 0.0, 2.0), 10.0, 1_000_000);
    assert!((p - s).abs() < 2e-3, "{p} vs {s}");
    let mut r = rng(8);
    for _ in 0..30 {
        let range = r.random_range(5.0..50.0);
        let rad = r.random_range(0.5..20.0);
        let d = disk(r.random_range(-60.0..60.0), r.random_range(-60.0..60.0), rad);
        let p = relay_link_probability(Point::ORIGIN, &d, range).unwrap();
        let s = relay_link_by_sampling(Point::ORIGIN, &d, range, 1_000_000);
        assert!((p - s).abs() < 2e-3, "{d:?} R={range}: {p} vs {s}");
    }
}

#[test]
fn tracker_link_matches_double_sampling() {
    let q = QuadratureConfig::default();
    let (a, b) = (disk(0.0, 0.0, 2.0), disk(10.0, 0.0, 2.0));
    let p = tracker_link_probability(&a, &b, 10.0, &q).unwrap();
    let s = tracker_link_by_sampling(&a, &b, 10.0, 1_000_000);
    assert!((p - s).abs() < 3e-3, "{p} vs {s}");
    let mut r = rng(9);
    for _ in 0..20 {
        let range = r.random_range(5.0..50.0);
        let a = disk(0.0, 0.0, r.random_range(0.5..10.0));
        let b = disk(r.random_range(0.0..60.0), r.random_range(0.0..20.0), r.random_range(0.5..10.0));
        let p = tracker_link_probability(&a, &b, range, &q).unwrap();
        let s = tracker_link_by_sampling(&a, &b, range, 1_000_000);
        assert!((p - s).abs() < 3e-3, "{a:?} {b:?} R={range}: {p} vs {s}");
    }
}

#[test]
fn single_hop_is_product_of_sampled_links() {
    let disks = [disk(8.0, 0.0, 3.0), disk(0.0, 9.0, 2.0), disk(-7.0, -7.0, 4.0)];
    let exact = single_hop_connectivity(Point::ORIGIN, &disks, 10.0).unwrap();
    let sampled: f64 = disks.iter().map(|d| relay_link_by_sampling(Point::ORIGIN, d, 10.0, 1_000_000)).product();
    assert!((exact - sampled).abs() < 5e-3, "{exact} vs {sampled}");
}

#[test]
fn triangle_closed_form() {
    let table = EdgeStateTable::new(3).unwrap();
    for p in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
        let v = network_connectivity(&EdgeProbabilityVector::new(3, vec![p; 3]).unwrap(), &table).unwrap();
        let closed = p * p * p + 3.0 * p * p * (1.0 - p);
        assert!((v - closed).abs() < 1e-15, "p={p}: {v} vs {closed}");
    }
    let half = network_connectivity(&EdgeProbabilityVector::new(3, vec![0.5; 3]).unwrap(), &table).unwrap();
    assert!((half - 0.5).abs() < 1e-15);
    assert!((simulate(&[0.5; 3], 3, 1_000_000, 1) - 0.5).abs() < 2e-3);
}

#[test]
fn four_node_table_matches_reachability() {
    let table = EdgeStateTable::new(4).unwrap();
    assert_eq!(table.rows(), 64);
    let edges = table.edges().to_vec();
    assert_eq!(edges, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    for row in 0..64 {
        let present = |a: usize, b: usize| {
            edges.iter().enumerate().any(|(e, &(i, j))| row >> e & 1 == 1 && ((i, j) == (a, b) || (i, j) == (b, a)))
        };
        assert_eq!(table.is_connected(row), bfs_with(4, present), "row {row:06b}");
    }
    // Spanning trees on four labelled nodes: 4^2 = 16, each with three edges.
    let trees = (0..64usize).filter(|&m| m.count_ones() == 3 && table.is_connected(m)).count();
    assert_eq!(trees, 16);
}

fn simulate(probs: &[f64], nodes: usize, samples: u64, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut ok = 0u64;
    let mut present = vec![false; probs.len()];
    for _ in 0..samples {
        for (slot, &p) in present.iter_mut().zip(probs) {
            *slot = r.random::<f64>() < p;
        }
        if bfs_with(nodes, |a, b| a != b && present[edge_index(nodes, a, b)]) {
            ok += 1;
        }
    }
    ok as f64 / samples as f64
}

#[test]
fn reliability_matches_bernoulli_simulation() {
    let table = EdgeStateTable::new(4).unwrap();
    let mut r = rng(31);
    for case in 0..20 {
        let probs: Vec<f64> = (0..edge_count(4)).map(|_| r.random()).collect();
        let exact = network_connectivity(&EdgeProbabilityVector::new(4, probs.clone()).unwrap(), &table).unwrap();
        let sim = simulate(&probs, 4, 1_000_000, 100 + case);
        assert!((exact - sim).abs() < 2e-3, "case {case}: {exact} vs {sim}");
    }
}

#[test]
fn conditioned_table_matches_full_sum() {
    let mut r = rng(4);
    for nodes in 2..=5 {
        let table = EdgeStateTable::new(nodes).unwrap();
        for _ in 0..50 {
            let probs: Vec<f64> = (0..edge_count(nodes)).map(|_| r.random()).collect();
            let full = network_connectivity(&EdgeProbabilityVector::new(nodes, probs.clone()).unwrap(), &table).unwrap();
            let cond = table.condition_on_tracker_links(&probs[nodes - 1..]).unwrap();
            assert!((cond.connectivity(&probs[..nodes - 1]) - full).abs() < 1e-12);
        }
    }
}

#[test]
fn ground_truth_matches_bfs() {
    let mut r = rng(12);
    for _ in 0..10_000 {
        let n = r.random_range(1..=5);
        let range = 100.0;
        let trackers: Vec<Point> =
            (0..n).map(|_| Point::new(r.random_range(-200.0..200.0), r.random_range(-200.0..200.0))).collect();
        let relay = Point::new(r.random_range(-200.0..200.0), r.random_range(-200.0..200.0));
        let mut all = vec![relay];
        all.extend(&trackers);
        let multi = ground_truth_connected(&trackers, relay, range, ConnectivityMode::MultiHop);
        let single = ground_truth_connected(&trackers, relay, range, ConnectivityMode::SingleHop);
        assert_eq!(multi, bfs_connected(&all, range));
        assert_eq!(single, trackers.iter().all(|t| t.distance(relay) <= range));
        assert!(!single || multi);
    }
}

fn probs4() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 6)
}

proptest! {
    #[test]
    fn reliability_is_monotone_in_every_edge(probs in probs4(), e in 0usize..6, bump in 0.0f64..1.0) {
        let table = EdgeStateTable::new(4).unwrap();
        let base = network_connectivity(&EdgeProbabilityVector::new(4, probs.clone()).unwrap(), &table).unwrap();
        let mut up = probs.clone();
        up[e] = (up[e] + bump).min(1.0);
        let raised = network_connectivity(&EdgeProbabilityVector::new(4, up).unwrap(), &table).unwrap();
        prop_assert!(raised >= base - 1e-12);
        prop_assert!((0.0..=1.0).contains(&base) && base.is_finite());
    }

    #[test]
    fn star_reliability_is_single_hop_product(relay in prop::collection::vec(0.0f64..=1.0, 3)) {
        let table = EdgeStateTable::new(4).unwrap();
        let mut probs = relay.clone();
        probs.extend([0.0; 3]);
        let v = network_connectivity(&EdgeProbabilityVector::new(4, probs).unwrap(), &table).unwrap();
        prop_assert!((v - relay.iter().product::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn multi_hop_at_least_single_hop(relay in prop::collection::vec(0.0f64..=1.0, 3), tracker in prop::collection::vec(0.0f64..=1.0, 3)) {
        let table = EdgeStateTable::new(4).unwrap();
        let mut probs = relay.clone();
        probs.extend(tracker);
        let v = network_connectivity(&EdgeProbabilityVector::new(4, probs).unwrap(), &table).unwrap();
        prop_assert!(v >= relay.iter().product::<f64>() - 1e-12);
    }

    #[test]
    fn link_probabilities_are_probabilities(
        x in -100.0f64..100.0, y in -100.0f64..100.0, ra in 0.5f64..30.0, rb in 0.5f64..30.0, range in 1.0f64..80.0,
    ) {
        let a = disk(x, y, ra);
        let b = disk(0.0, 0.0, rb);
        let p = relay_link_probability(Point::ORIGIN, &a, range).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let q = tracker_link_probability(&a, &b, range, &QuadratureConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
    }
}
