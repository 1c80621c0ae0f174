//! End-to-end checks of the binary: exit codes, report files, CSV shapes.

use std::path::{Path, PathBuf};
use std::process::Output;

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_pathlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_config(command: &str, config: &str, dir: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let config_path = dir.join("run.json");
    std::fs::write(&config_path, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![
        command,
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    (run(&args), out)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_config_is_a_usage_error() {
    let output = run(&["propagate"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn malformed_lattice_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let (output, _) = run_with_config(
        "propagate",
        r#"{"lattice": {"num_slices": 1, "num_sites": 3, "dt": 1.0, "dx": 1.0,
                        "start_site": 0, "end_site": 0}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn uniform_conditional_csv_on_trivial_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "propagate",
        r#"{"lattice": {"num_slices": 2, "num_sites": 5, "dt": 1.0, "dx": 1.0,
                        "start_site": 2, "end_site": 2}}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let csv = std::fs::read_to_string(out.join("conditional.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let probability: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((probability - 0.2).abs() < 1e-12, "{row}");
    }
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn severed_lattice_propagates_with_a_note_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "propagate",
        r#"{"lattice": {"num_slices": 3, "num_sites": 3, "dt": 1.0, "dx": 1.0,
                        "start_site": 1, "end_site": 1,
                        "blocked": [[1, 0], [1, 1], [1, 2]]}}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("probability_report.json"));
    assert_eq!(report["probability"]["severed"], Value::Bool(true));
    assert_eq!(report["probability"]["joint"], 0.0);
    assert!(report["note"].as_str().unwrap().contains("severed"));
}

#[test]
fn explicit_actions_parse_recovers_the_split() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "parse",
        r#"{"explicit_actions": [0.0, 0.0, 1.5707963267948966]}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("partition_report.json"));
    let partition = &report["outcome"]["partition"];
    assert_eq!(partition["valid"], Value::Bool(true));
    assert_eq!(partition["sets"].as_array().unwrap().len(), 2);
    assert!((partition["total_probability"].as_f64().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn oracle_refuses_large_ensembles_naming_the_bell_number() {
    let dir = tempfile::tempdir().unwrap();
    let (output, _) = run_with_config(
        "oracle",
        r#"{"explicit_actions": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]}"#,
        dir.path(),
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("678570"), "{stderr}");
}

#[test]
fn oracle_lists_valid_partitions_for_small_ensembles() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "oracle",
        r#"{"explicit_actions": [0.0, 0.0, 1.5707963267948966]}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("oracle_parsings.json"));
    assert!(report["num_valid"].as_u64().unwrap() >= 2);
}

#[test]
fn reconstruct_emits_one_field_per_set() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "reconstruct",
        r#"{"lattice": {"num_slices": 3, "num_sites": 5, "dt": 1.0, "dx": 1.0,
                        "start_site": 2, "end_site": 2},
            "set_members": [[0, 4], [1, 2, 3]]}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("reconstruction_report.json"));
    assert_eq!(report["fields"].as_array().unwrap().len(), 2);
    assert!(out.join("field_000.csv").is_file());
    assert!(out.join("field_001.csv").is_file());
    assert!(!out.join("field_002.csv").exists());
}

#[test]
fn scenario_double_slit_writes_fringe_and_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "scenario",
        r#"{"scenario": {
              "kind": "double_slit", "barrier_slice": 2, "slit_sites": [2, 4],
              "lattice": {"num_slices": 5, "num_sites": 7, "dt": 1.0, "dx": 1.0,
                          "start_site": 3, "end_site": 3}}}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("double_slit_report.json"));
    for ratio in report["on_axis_ratios"].as_array().unwrap() {
        assert!((ratio.as_f64().unwrap() - 4.0).abs() < 1e-9);
    }
    assert!(out.join("fringe.csv").is_file());
}

#[test]
fn scenario_triple_slit_writes_sorkin_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "scenario",
        r#"{"scenario": {
              "kind": "triple_slit", "barrier_slice": 1, "slit_sites": [1, 3, 5],
              "lattice": {"num_slices": 4, "num_sites": 7, "dt": 1.0, "dx": 1.0,
                          "start_site": 3, "end_site": 3}}}"#,
        dir.path(),
        &[],
    );
    assert!(output.status.success());
    let report = json(&out.join("triple_slit_report.json"));
    assert!(report["max_abs_sorkin"].as_f64().unwrap() <= 1e-9);
    let csv = std::fs::read_to_string(out.join("sorkin.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn budget_exhaustion_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let (output, _) = run_with_config(
        "propagate",
        r#"{"lattice": {"num_slices": 12, "num_sites": 9, "dt": 1.0, "dx": 1.0,
                        "start_site": 4, "end_site": 4}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("budget"), "{stderr}");
}

#[test]
fn strategy_and_seed_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let (output, out) = run_with_config(
        "parse",
        r#"{"explicit_actions": [0.3, 3.4415926535897933, 1.9, 5.041592653589793, 0.7]}"#,
        dir.path(),
        &["--strategy", "annealing", "--seed", "11"],
    );
    assert!(output.status.success());
    let report = json(&out.join("partition_report.json"));
    assert_eq!(report["outcome"]["trace"]["strategy"], "annealing");
    assert_eq!(report["outcome"]["trace"]["seed"], 11);
    assert_eq!(json(&out.join("manifest.json"))["seed"], 11);
}
