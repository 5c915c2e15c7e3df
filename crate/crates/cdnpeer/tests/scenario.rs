use std::path::Path;

use cdnpeer::commands::{parse_values, set_parameter};
use cdnpeer::scenario::{self, Scenario};
use cdnpeer::CliError;
use cdnpeer_core::sim::{Predictor, World};
use proptest::prelude::*;
use serde_json::{json, Value};

fn hotspot_value() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/hotspot.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn codes(s: &Scenario) -> Vec<&'static str> {
    s.validate().iter().map(|v| v.code).collect()
}

#[test]
fn omitted_sections_take_engine_defaults() {
    let mut v = hotspot_value();
    let obj = v.as_object_mut().unwrap();
    obj.remove("auction");
    obj.remove("engine");
    let s = scenario::from_value(v).unwrap();
    let cfg = s.checked_config().unwrap();
    assert_eq!(cfg.auction.winners_wanted, 1);
    assert_eq!(cfg.engine.predictor, Predictor::Empirical);
    assert_eq!(cfg.engine.cold_start_budget, None);
    assert!(cfg.auctions_enabled);
}

#[test]
fn walk_predictor_defaults_follow_the_workload() {
    let mut v = hotspot_value();
    v["workload"] = json!({
        "kind": "random-walk", "start": 10, "max_step": 2,
        "arrival_rate": 1.0, "region_weights": [0.25, 0.25, 0.25, 0.25], "duration_s": 100
    });
    v["flash_crowds"] = json!([]);
    let cfg = scenario::from_value(v).unwrap().checked_config().unwrap();
    assert_eq!(cfg.walk.max_step, 2);
    assert_eq!(cfg.zipf.mu, 0.5);
}

#[test]
fn bad_times_and_names_are_violations() {
    let mut v = hotspot_value();
    v["engine"]["detect_interval_s"] = json!(-1.0);
    v["engine"]["predictor"] = json!("oracle");
    let s = scenario::from_value(v).unwrap();
    let c = codes(&s);
    assert!(c.contains(&"negative-time"), "{c:?}");
    assert!(c.contains(&"unknown-predictor"), "{c:?}");
    assert!(matches!(s.checked_config(), Err(CliError::Invalid(_))));
}

#[test]
fn policy_subjects_must_exist() {
    let mut v = hotspot_value();
    v["policies"] = json!([{ "subject": "ghost", "rule": { "min-duration-s": 5 }, "effect": "deny" }]);
    assert!(codes(&scenario::from_value(v).unwrap()).contains(&"unknown-provider"));
}

#[test]
fn set_parameter_walks_objects_and_arrays() {
    let mut v = hotspot_value();
    set_parameter(&mut v, "providers.2.eagerness", 0.2).unwrap();
    assert_eq!(v["providers"][2]["eagerness"], json!(0.2));
    set_parameter(&mut v, "seed", 9.0).unwrap();
    assert_eq!(v["seed"], json!(9));
    assert!(matches!(set_parameter(&mut v, "providers.9.eagerness", 1.0), Err(CliError::Usage(_))));
    assert!(matches!(set_parameter(&mut v, "providers.0.id", 1.0), Err(CliError::Usage(_))));
}

#[test]
fn value_lists() {
    assert_eq!(parse_values("0.6, 0.8,0.95").unwrap(), [0.6, 0.8, 0.95]);
    assert!(matches!(parse_values(" , "), Err(CliError::Usage(_))));
    assert!(matches!(parse_values("1,two"), Err(CliError::Usage(_))));
}

#[test]
fn hash_covers_the_bytes() {
    assert_eq!(scenario::sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Whatever the validator says, building a world agrees.
    #[test]
    fn validate_agrees_with_world(
        beta in 0.0f64..1.2,
        region in 0u16..6,
        rate in -1.0f64..5.0,
        threshold in -10.0f64..200.0,
        eagerness in -0.5f64..0.5,
        winners in 0usize..3,
    ) {
        let mut v = hotspot_value();
        v["econ"]["beta"] = json!(beta);
        v["econ"]["gamma"] = json!(1.0 - 0.6 - 0.001);
        v["providers"][1]["region"] = json!(region);
        v["workload"]["arrival_rate"] = json!(rate);
        v["econ"]["delay_threshold_ms"] = json!(threshold);
        v["providers"][2]["eagerness"] = json!(eagerness);
        v["auction"]["winners_wanted"] = json!(winners);
        let s = scenario::from_value(v).unwrap();
        let (cfg, extra) = s.to_config();
        prop_assert!(extra.is_empty());
        prop_assert_eq!(s.validate().is_empty(), World::new(cfg).is_ok());
    }
}
