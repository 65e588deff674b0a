mod common;

use std::f64::consts::PI;

use common::rng;
use proptest::prelude::*;
use rand::Rng;
use relay_core::mobility::{
    enumerate_control_sequences, normalize_angle, step_relay, tracker_position, ControlInput, ControlSet, PlanSegment,
    RelayLimits, RelayState, TrackerPlan,
};
use relay_core::Point;

fn random_plan(r: &mut impl Rng, legs: usize, end: f64) -> TrackerPlan {
    let mut t = 0.0;
    let segments = (0..legs)
        .map(|_| {
            let seg = PlanSegment {
                start_time: t,
                speed: r.random_range(25.0..=35.0),
                heading: r.random_range(-PI..PI),
            };
            t += r.random_range(270.0..330.0);
            seg
        })
        .collect();
    TrackerPlan::new(Point::new(r.random_range(-1e3..1e3), r.random_range(-1e3..1e3)), 100.0, segments, end)
        .unwrap()
}

/// Position by forward Euler at a fixed step, reading the velocity off the
/// plan's segment table.
fn euler_position(plan: &TrackerPlan, t: f64, h: f64) -> Point {
    let segs = plan.segments();
    let mut pos = plan.origin();
    let n = (t / h).round() as usize;
    for k in 0..n {
        let tk = k as f64 * h;
        let seg = segs.iter().rev().find(|s| s.start_time <= tk).unwrap();
        pos = Point::new(pos.x + seg.speed * seg.heading.cos() * h, pos.y + seg.speed * seg.heading.sin() * h);
    }
    pos
}

#[test]
fn plan_matches_euler_integration() {
    let mut r = rng(2);
    for _ in 0..5 {
        let plan = random_plan(&mut r, 8, 2400.0);
        // Segment starts are not on the Euler grid; snap them so the oracle
        // integrates each leg for exactly its length.
        let segs: Vec<PlanSegment> = plan
            .segments()
            .iter()
            .map(|s| PlanSegment { start_time: (s.start_time * 100.0).round() / 100.0, ..*s })
            .collect();
        let plan = TrackerPlan::new(plan.origin(), 100.0, segs, 2400.0).unwrap();
        for t in [0.0, 1.0, 137.25, 600.0, 1999.99, 2400.0] {
            let got = tracker_position(&plan, t).unwrap();
            let want = euler_position(&plan, t, 0.01);
            let err = Point::new(got.position[0], got.position[1]).distance(want);
            assert!(err < 1e-6, "t={t}: error {err}");
        }
    }
}

#[test]
fn step_examples() {
    let limits = RelayLimits { speed_min: 20.0, speed_max: 40.0, max_turn: PI / 6.0 };
    let s = RelayState::new(Point::ORIGIN, 0.0, 30.0);
    let a = step_relay(&s, &ControlInput { speed: 30.0, heading_delta: 0.0 }, 2.0, &limits).unwrap();
    assert!((a.position.x - 60.0).abs() < 1e-12 && a.position.y.abs() < 1e-12);
    let b = step_relay(&s, &ControlInput { speed: 20.0, heading_delta: PI / 6.0 }, 2.0, &limits).unwrap();
    assert!((b.position.x - 34.641_016_151_377_54).abs() < 1e-9 && (b.position.y - 20.0).abs() < 1e-9);
    assert!(step_relay(&s, &ControlInput { speed: 20.0, heading_delta: PI / 5.0 }, 2.0, &limits).is_err());
    assert!(step_relay(&s, &ControlInput { speed: 45.0, heading_delta: 0.0 }, 2.0, &limits).is_err());
}

#[test]
fn sequence_counts_and_order() {
    let set = ControlSet::new(vec![20.0, 30.0, 40.0], vec![-PI / 6.0, 0.0, PI / 6.0]).unwrap();
    assert_eq!(enumerate_control_sequences(&set, 1).len(), 9);
    let four = enumerate_control_sequences(&set, 4);
    assert_eq!(four.len(), 6561);
    assert_eq!(four, enumerate_control_sequences(&set, 4));
    assert_eq!(enumerate_control_sequences(&set, 0), vec![Vec::<ControlInput>::new()]);
    // Lexicographic: the last control varies fastest.
    assert_eq!(four[1][3], ControlInput { speed: 20.0, heading_delta: 0.0 });
    assert_eq!(four[1][..3], four[0][..3]);
    assert_eq!(four[6560], vec![ControlInput { speed: 40.0, heading_delta: PI / 6.0 }; 4]);
}

proptest! {
    #[test]
    fn relay_step_respects_limits(
        x in -1e5f64..1e5, y in -1e5f64..1e5, heading in -PI..PI, speed_idx in 0usize..3, turn in -1.0f64..=1.0,
        dt in 0.1f64..10.0,
    ) {
        let limits = RelayLimits { speed_min: 20.0, speed_max: 40.0, max_turn: PI / 6.0 };
        let s = RelayState::new(Point::new(x, y), heading, 30.0);
        let u = ControlInput { speed: [20.0, 30.0, 40.0][speed_idx], heading_delta: turn * PI / 6.0 };
        let next = step_relay(&s, &u, dt, &limits).unwrap();
        prop_assert!((next.position.distance(s.position) - u.speed * dt).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())));
        prop_assert!(normalize_angle(next.heading - s.heading).abs() <= PI / 6.0 + 1e-12);
        prop_assert!(next.heading > -PI && next.heading <= PI);
        prop_assert!(next.speed >= limits.speed_min && next.speed <= limits.speed_max);
    }

    #[test]
    fn tracker_position_is_continuous(seed in 0u64..1000, t in 0.0f64..2399.0) {
        let mut r = rng(seed);
        let plan = random_plan(&mut r, 8, 2400.0);
        let eps = 1e-3;
        let a = tracker_position(&plan, t).unwrap();
        let b = tracker_position(&plan, t + eps).unwrap();
        let jump = Point::new(a.position[0], a.position[1]).distance(Point::new(b.position[0], b.position[1]));
        prop_assert!(jump <= 35.0 * eps + 1e-6);
    }
}
