use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn cdnpeer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdnpeer")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Bundled hotspot scenario with `edit` applied, written to `dir`.
fn edited(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(bundled("hotspot")).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join("edited.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn metric(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in metrics"))
        .to_string()
}

#[test]
fn bundled_scenarios_validate() {
    for name in ["hotspot", "walk", "zipf", "mixed"] {
        let p = bundled(name);
        let o = cdnpeer(&["validate", "--scenario", p.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
}

#[test]
fn coefficient_sum_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |v| v["econ"]["beta"] = Value::from(0.8));
    let o = cdnpeer(&["validate", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("coefficient-sum"), "{}", stderr(&o));
}

#[test]
fn every_violation_is_listed() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |v| {
        v["providers"][1]["region"] = Value::from(9);
        v["workload"]["arrival_rate"] = Value::from(-1.0);
    });
    let o = cdnpeer(&["validate", "--scenario", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("unknown-region"), "{err}");
    assert!(err.contains("arrival_rate"), "{err}");
}

#[test]
fn run_refuses_invalid_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |v| v["econ"]["beta"] = Value::from(0.8));
    let out = dir.path().join("out");
    let o = cdnpeer(&["run", "--scenario", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unknown_fields_and_bad_json_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |v| v["econ"]["alhpa"] = Value::from(1.0));
    assert_eq!(cdnpeer(&["validate", "--scenario", p.to_str().unwrap()]).status.code(), Some(1));
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(cdnpeer(&["validate", "--scenario", junk.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn missing_scenario_is_a_usage_error() {
    assert_eq!(cdnpeer(&["validate", "--scenario", "/nonexistent/x.json"]).status.code(), Some(1));
    assert_eq!(cdnpeer(&["run", "--out", "/tmp/x"]).status.code(), Some(1));
    assert_eq!(cdnpeer(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("out");
    let p = bundled("hotspot");
    let o = cdnpeer(&["run", "--scenario", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn run_writes_self_describing_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("hotspot");
    let o = cdnpeer(&["run", "--scenario", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("metrics.txt")).unwrap();
    assert_eq!(metric(&text, "seed"), "7");
    assert_eq!(metric(&text, "scenario_hash").len(), 64);
    assert_eq!(metric(&text, "auctions"), "true");
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 7);
    assert_eq!(json["scenario_hash"].as_str().unwrap(), metric(&text, "scenario_hash"));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(csv.starts_with("metric,value\nscenario,hotspot\n"), "{csv}");
    assert_eq!(csv.lines().count(), text.lines().count() + 1);
    let log = std::fs::read_to_string(dir.path().join("events.log")).unwrap();
    assert!(log.lines().count() as u64 >= json["total_requests"].as_u64().unwrap());
    let printed = String::from_utf8_lossy(&o.stdout);
    assert!(printed.contains("sla violations"), "{printed}");
}

#[test]
fn no_auction_is_a_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("hotspot");
    let o = cdnpeer(&["run", "--scenario", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--no-auction"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("metrics.txt")).unwrap();
    assert_eq!(metric(&text, "auctions"), "false");
    assert_eq!(metric(&text, "auctions_opened"), "0");
    assert_eq!(metric(&text, "replicas_placed"), "0");
}

#[test]
fn sweep_writes_one_row_per_value_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("hotspot");
    let o = cdnpeer(&[
        "sweep", "--scenario", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
        "--param", "workload.mu", "--values", "0.95,0.6,0.8",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("parameter,value,seed,sla_violation_rate"));
    let values: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["0.95", "0.6", "0.8"]);
}

#[test]
fn sweep_rows_match_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("hotspot");
    let sweep_dir = dir.path().join("sweep");
    let o = cdnpeer(&[
        "sweep", "--scenario", p.to_str().unwrap(), "--out", sweep_dir.to_str().unwrap(),
        "--param", "auction.winners_wanted", "--values", "1,2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    let row2: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    let single = edited(dir.path(), |v| v["auction"]["winners_wanted"] = Value::from(2));
    let run_dir = dir.path().join("run");
    assert!(cdnpeer(&["run", "--scenario", single.to_str().unwrap(), "--out", run_dir.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(run_dir.join("metrics.txt")).unwrap();
    assert_eq!(row2[3], metric(&text, "sla_violation_rate"));
    assert_eq!(row2[5], metric(&text, "replicas_placed"));
}

#[test]
fn sweep_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("hotspot");
    let base = ["sweep", "--scenario", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()];
    let with = |param: &str, values: &str| {
        let mut args = base.to_vec();
        args.extend(["--param", param, "--values", values]);
        cdnpeer(&args).status.code()
    };
    assert_eq!(with("econ.alpha", ""), Some(1));
    assert_eq!(with("econ.alpha", "x"), Some(1));
    assert_eq!(with("name", "1"), Some(1));
    assert_eq!(with("econ.nope", "1"), Some(1));
    assert_eq!(with("econ.beta", "0.1"), Some(1));
}

#[test]
fn compare_predictors_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = bundled("walk");
    let o = cdnpeer(&["compare-predictors", "--scenario", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("predictors.csv")).unwrap();
    assert!(csv.starts_with("auction,time_s,content,duration_s,horizon,empirical,binomial,zipf,realized\n"));
    assert!(csv.lines().count() > 1);
    let mae = std::fs::read_to_string(dir.path().join("predictor_mae.csv")).unwrap();
    assert_eq!(mae.lines().count(), 4);
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        if cols[4] == "0" {
            assert_eq!(&cols[5..8], ["0", "0", "0"]);
        }
    }
}
