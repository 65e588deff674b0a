use relay_sim::config::{default_preset, ScenarioConfig, SpeedClass};
use relay_sim::{materialize, SimError};

#[test]
fn preset_reference_values() {
    let p = default_preset();
    assert_eq!(p.n_trackers, 3);
    assert_eq!(p.initial_positions_m, vec![[0.0, 0.0], [500.0, 500.0], [1000.0, 0.0]]);
    assert_eq!(p.sim_duration_s, 171.0 * 60.0);
    assert_eq!(p.step_dt_s, 2.0);
    assert_eq!(p.estimate_period_s, 30.0);
    assert_eq!(p.comm_range_m, 100_000.0);
    assert_eq!(p.speed_class.speeds(), &[25.0, 30.0, 35.0]);
    assert_eq!(p.planner.speed_set_mps, vec![20.0, 30.0, 40.0]);
    assert_eq!(p.planner.delta_set_deg, vec![-30.0, 0.0, 30.0]);
}

#[test]
fn different_seeds_give_different_schedules() {
    let mut identical = 0;
    for pair in 0..100u64 {
        let mut a = default_preset();
        a.seed = 2 * pair;
        let mut b = default_preset();
        b.seed = 2 * pair + 1;
        let sa = materialize(a).unwrap();
        let sb = materialize(b).unwrap();
        let times = |s: &relay_sim::Scenario| -> Vec<f64> {
            s.plans.iter().flat_map(|p| p.segments().iter().map(|g| g.start_time)).collect()
        };
        if times(&sa) == times(&sb) {
            identical += 1;
        }
    }
    assert!(identical < 1, "{identical} identical schedules");
}

#[test]
fn json_round_trip_reproduces_scenario() {
    for seed in [0, 7, u64::MAX] {
        let mut c = default_preset();
        c.seed = seed;
        c.speed_class = SpeedClass::Fast;
        let text = c.to_json();
        let back = ScenarioConfig::from_json(&text).unwrap();
        assert_eq!(materialize(c).unwrap(), materialize(back).unwrap());
    }
}

#[test]
fn speeds_stay_in_class_at_all_times() {
    for class in [SpeedClass::Slow, SpeedClass::Normal, SpeedClass::Fast, SpeedClass::Mixed] {
        let mut c = default_preset();
        c.speed_class = class;
        c.seed = 99;
        let s = materialize(c).unwrap();
        for plan in &s.plans {
            let mut t = 0.0;
            while t <= plan.end_time() {
                let v = plan.state_at(t).unwrap().velocity;
                let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
                assert!(class.speeds().iter().any(|c| (c - speed).abs() < 1e-9), "{speed}");
                t += 37.0;
            }
        }
    }
}

#[test]
fn heading_changes_respect_the_turn_bound() {
    let mut c = default_preset();
    c.maneuver_turn_max_deg = 20.0;
    let s = materialize(c).unwrap();
    for plan in &s.plans {
        for pair in plan.segments().windows(2) {
            let turn = relay_core::mobility::normalize_angle(pair[1].heading - pair[0].heading);
            assert!(turn.abs() <= 20f64.to_radians() + 1e-12);
        }
    }
}

#[test]
fn unparsable_and_inconsistent_configs() {
    assert!(ScenarioConfig::from_json("{}").is_err());
    let mut v = serde_json::to_value(default_preset()).unwrap();
    v["speed_class"] = serde_json::json!("warp");
    assert!(serde_json::from_value::<ScenarioConfig>(v).is_err());
    let mut c = default_preset();
    c.n_trackers = 2;
    match materialize(c) {
        Err(SimError::Config { field, .. }) => assert_eq!(field, "initial_positions_m"),
        other => panic!("{other:?}"),
    }
}

fn any_class() -> impl proptest::strategy::Strategy<Value = SpeedClass> {
    proptest::sample::select(vec![SpeedClass::Slow, SpeedClass::Normal, SpeedClass::Fast, SpeedClass::Mixed])
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

    #[test]
    fn generated_plans_respect_class_and_schedule(seed in proptest::num::u64::ANY, class in any_class(), turn in 0.0f64..=180.0) {
        let mut c = default_preset();
        c.seed = seed;
        c.speed_class = class;
        c.maneuver_turn_max_deg = turn;
        let s = materialize(c.clone()).unwrap();
        for plan in &s.plans {
            for seg in plan.segments() {
                proptest::prop_assert!(class.speeds().contains(&seg.speed));
            }
            for pair in plan.segments().windows(2) {
                let gap = pair[1].start_time - pair[0].start_time;
                proptest::prop_assert!(gap >= 0.9 * c.maneuver_period_s - 1e-9 && gap <= 1.1 * c.maneuver_period_s + 1e-9);
                let delta = relay_core::mobility::normalize_angle(pair[1].heading - pair[0].heading);
                proptest::prop_assert!(delta.abs() <= turn.to_radians() + 1e-12);
            }
        }
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        proptest::prop_assert_eq!(materialize(back).unwrap(), s);
    }
}
