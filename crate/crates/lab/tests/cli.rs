use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn deloc_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deloc-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SURVEY: &str = r#"{"kind": "deloc_survey", "master_seed": 3, "n": 10, "trials": 2,
  "entry": {"kind": "bernoulli_sym"}, "eps_grid": [0.8, 1.0]}"#;

#[test]
fn run_writes_tables_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SURVEY);
    let out = dir.path().join("out");
    let o = deloc_lab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "deloc_survey.csv",
        "deloc_survey_trials.csv",
        "deloc_survey_summary.csv",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(out.join("deloc_survey.csv")).unwrap();
    assert!(
        csv.starts_with("trial,index,eigenvalue_re,eigenvalue_im,linf,min_mass_0.8,min_mass_1\n")
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 10);

    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["kind"], "deloc_survey");
    assert_eq!(m["master_seed"], 3);
    assert_eq!(m["seed_source"], "config");
    assert_eq!(m["rows"]["deloc_survey_trials.csv"], 2);
    assert_eq!(m["config"]["n"], 10);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SURVEY);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(
        deloc_lab(&["run", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"])
            .status
            .success()
    );
    assert!(
        deloc_lab(&["run", &cfg, "--out", b.to_str().unwrap(), "--threads", "4"])
            .status
            .success()
    );
    for f in [
        "deloc_survey.csv",
        "deloc_survey_trials.csv",
        "deloc_survey_summary.csv",
    ] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SURVEY);
    let out = dir.path().join("out");
    let o = deloc_lab(&["run", &cfg, "--out", out.to_str().unwrap(), "--seed", "77"]);
    assert!(o.status.success());
    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["master_seed"], 77);
    assert_eq!(m["seed_source"], "command_line");
    assert_eq!(m["config"]["master_seed"], 77);
}

#[test]
fn missing_seed_warns_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        r#"{"kind": "density_curve", "dists": [{"kind": "uniform", "a": 0, "b": 1}], "weights": [1], "smoothing_sigma": 0.1, "grid_size": 11}"#,
    );
    let out = dir.path().join("out");
    let o = deloc_lab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("master_seed missing"));
    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed_source"], "default");
    assert!(m["warnings"][0]["warning"]
        .as_str()
        .unwrap()
        .contains("master_seed"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"kind": "nodal", "n": 10, "p": 2.0, "extra": 1}"#,
    );
    let o = deloc_lab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`p`") && err.contains("`extra`"), "{err}");

    let o = deloc_lab(&["run", &cfg.replace("bad", "absent")]);
    assert_eq!(o.status.code(), Some(2));
    let o = deloc_lab(&["run", &write(dir.path(), "junk.json", "{not json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_threads_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SURVEY);
    assert_eq!(
        deloc_lab(&["run", &cfg, "--threads", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn numerical_failure_exits_with_three_and_names_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "big.json",
        r#"{"kind": "deloc_survey", "master_seed": 3, "n": 10, "trials": 2, "eps_grid": [0.8],
            "entry": {"kind": "gaussian", "sigma": 1e300}}"#,
    );
    let o = deloc_lab(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("master=3"));
}

#[test]
fn edge_list_resolves_against_the_config_directory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.txt", "n 4\n0 1\n1 2\n2 3\n3 0\n");
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"kind": "nodal", "master_seed": 1, "edge_list": "c4.txt"}"#,
    );
    let out = dir.path().join("out");
    let o = deloc_lab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("nodal.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
}

#[test]
fn kinds_lists_the_registry() {
    let o = deloc_lab(&["kinds"]);
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.lines().count() == 6 && s.contains("graph_audit"), "{s}");
}
