use std::path::Path;
use std::process::Command as Proc;

use modesig_cli::report::Report;
use modesig_cli::{emit_report, execute, Command, RunConfig};
use modesig_core::synth::{Component, Family};
use modesig_core::GeneratorSpec;

fn modesig(args: &[&str]) -> std::process::Output {
    Proc::new(env!("CARGO_BIN_EXE_modesig")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_test_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = modesig(&["simulate", "--family", "gaussian", "--n", "200", "--seed", "4", "--out", s(&sim)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = sim.join("data.csv");
    let again = dir.path().join("again");
    modesig(&["simulate", "--family", "gaussian", "--n", "200", "--seed", "4", "--out", s(&again)]);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(again.join("data.csv")).unwrap());

    let res = dir.path().join("res");
    let out = modesig(&[
        "test", "--input", s(&csv), "--h", "1.0", "--alpha", "0.10", "--B", "200", "--seed", "7", "--out", s(&res),
        "--plots",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(res.join("report.json")).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!(report.config.b, 200);
    assert_eq!(report.candidates.len(), report.portraits.len());
    assert_eq!(report.to_json(), text.as_bytes());
    assert!(res.join("eigenportrait.svg").exists());
}

#[test]
fn spec_file_drives_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"n":180,"seed":3,"family":"singular-mixture","mu":10.0,"sigma":1.0}"#).unwrap();
    let out_dir = dir.path().join("o");
    let out = modesig(&["simulate", "--family", "singular-mixture", "--spec", s(&spec), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("data.csv")).unwrap();
    assert_eq!(text.lines().count(), 180);
    assert!(text.lines().any(|l| l == "0"));

    let out = modesig(&["simulate", "--family", "ring", "--spec", s(&spec), "--out", s(&out_dir)]);
    assert!(!out.status.success());
}

#[test]
fn csv_errors_are_reported_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,oops\n").unwrap();
    let out = modesig(&["test", "--input", s(&bad), "--h", "1", "--out", s(dir.path())]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2, column 2"), "{err}");

    std::fs::write(&bad, "").unwrap();
    let out = modesig(&["test", "--input", s(&bad), "--h", "1", "--out", s(dir.path())]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty file"));
}

#[test]
fn config_file_runs_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let out_dir = dir.path().join("out");
    let cfg = serde_json::json!({
        "command": "bandwidth",
        "generator": {"n": 150, "seed": 2, "family": "mixture", "components": [
            {"weight": 0.5, "mean": [-4.0], "sd": [1.0]},
            {"weight": 0.5, "mean": [4.0], "sd": [1.0]}
        ]},
        "grid": {"min": 0.2, "max": 4.0, "count": 6},
        "B": 100,
        "seed": 9,
        "out": out_dir,
        "plots": true
    });
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let first = modesig(&["--threads", "1", "run", "--config", s(&cfg_path)]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let a = std::fs::read(out_dir.join("report.json")).unwrap();
    let second = modesig(&["--threads", "3", "run", "--config", s(&cfg_path)]);
    assert!(second.status.success());
    assert_eq!(a, std::fs::read(out_dir.join("report.json")).unwrap());
    assert!(out_dir.join("bandwidth.svg").exists());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["scan"]["h"].as_array().unwrap().len(), 6);
    assert!(v["scan"]["N"].is_array());
}

#[test]
fn empty_report_writes_placeholder_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::Test, dir.path());
    cfg.input = Some("unused.csv".into());
    cfg.h = Some(1.0);
    let report = Report::new(cfg).with_mode_test(&modesig_core::ModeTestReport::empty());
    let files = emit_report(&report, dir.path(), true).unwrap();
    assert_eq!(files.len(), 2);
    let svg = std::fs::read_to_string(dir.path().join("eigenportrait.svg")).unwrap();
    assert!(svg.contains("k = 0") && !svg.contains("whisker"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["portraits"], serde_json::json!([]));
    assert!(v["scan"].is_null() && v["persistence"].is_null());
}

#[test]
fn four_mode_planar_portrait() {
    let blob = |x: f64, y: f64| Component {
        weight: 0.25,
        mean: vec![x, y],
        sd: vec![0.5, 0.5],
    };
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::Test, dir.path());
    cfg.generator = Some(GeneratorSpec {
        n: 800,
        seed: 21,
        family: Family::Mixture {
            components: vec![blob(-5.0, -5.0), blob(-5.0, 5.0), blob(5.0, -5.0), blob(5.0, 5.0)],
        },
    });
    cfg.h = Some(0.8);
    cfg.b = 200;
    cfg.plots = true;
    let report = execute(&cfg).unwrap();
    assert_eq!(report.portraits.len(), 4);
    emit_report(&report, dir.path(), true).unwrap();
    let svg = std::fs::read_to_string(dir.path().join("eigenportrait.svg")).unwrap();
    assert_eq!(svg.matches("class=\"panel\"").count(), 4);
    assert_eq!(svg.matches("class=\"whisker\"").count(), 8);
    let back: Report = serde_json::from_slice(&report.to_json()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn persist_command_writes_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::Persist, dir.path());
    cfg.generator = Some(modesig_core::synth::presets::three_gaussians_1d(200, 1));
    cfg.h = Some(1.0);
    cfg.b = 100;
    cfg.grid_res = Some(64);
    let report = execute(&cfg).unwrap();
    let p = report.persistence.as_ref().unwrap();
    assert_eq!(p.pairs.len(), p.retained.len());
    assert!(p.pairs.iter().all(|q| q[1] >= q[0]));
    emit_report(&report, dir.path(), true).unwrap();
    assert!(dir.path().join("persistence.svg").exists());
    assert!(!dir.path().join("eigenportrait.svg").exists());
}

#[test]
fn rejects_conflicting_sources() {
    let out = modesig(&["test", "--input", "a.csv", "--spec", "b.json", "--h", "1", "--out", "x"]);
    assert!(!out.status.success());
    let out = modesig(&["test", "--h", "1", "--out", "x"]);
    assert!(!out.status.success());
}
