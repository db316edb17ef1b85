//! End-to-end runs of the opfeast binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_opfeast"));
    c.env_remove("OPFEAST_LOG");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn results(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

fn in_region(run: &Value) -> Vec<f64> {
    run["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["in_region"].as_bool().unwrap())
        .map(|e| e["re"].as_f64().unwrap())
        .collect()
}

#[test]
fn run_demo_config_finds_the_first_mode() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("demo-oscillator.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = results(dir.path());
    assert_eq!(r["converged"], Value::Bool(true));
    let v = in_region(&r["runs"][0]);
    assert_eq!(v.len(), 1);
    assert!((v[0] - 2.4674011002723395).abs() <= 1e-9);
}

#[test]
fn missing_config_exits_1() {
    let out = run(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn malformed_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"problem\": \"oscillator\",\n  \"tol\": \"small\"\n}\n").unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn zero_iterations_exit_2_with_empty_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("demo-oscillator.json");
    let out = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--max-iter",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = results(dir.path());
    assert_eq!(r["converged"], Value::Bool(false));
    assert!(r["runs"][0]["residual_history"].as_array().unwrap().is_empty());
}

#[test]
fn beam_demo_matches_the_shooting_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo", "beam", "--mode", "rqi", "--n", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = results(dir.path());
    let v = in_region(&r["runs"][0]);
    // independent shooting value for the tapered cantilever on [0, 1]
    assert!((v[0] - 14.524008658437506).abs() <= 1e-9 * 14.5);
    assert!(r["runs"][0]["iterations"].as_u64().unwrap() <= 6);
}

#[test]
fn regular_slep_demo_stays_in_the_unit_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo", "regular-slep", "--n", "100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = results(dir.path());
    let v = in_region(&r["runs"][0]);
    assert_eq!(v.len(), 1);
    let center = r["runs"][0]["filter"]["center"][0].as_f64().unwrap();
    assert!((v[0] - center).abs() < 1.0);
}

#[test]
fn unknown_demo_lists_the_catalog() {
    let out = run(&["demo", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["oscillator", "regular-slep", "indefinite-slep", "beam", "halfplane-synthetic", "thin-film"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn single_thread_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run(&[
            "demo",
            "halfplane-synthetic",
            "--threads",
            "1",
            "--seed",
            "3",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["results.json", "eigenfunctions.csv", "coefficients.csv", "filter_grid.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn every_csv_has_named_columns_with_units() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo", "oscillator", "--n", "1,2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut seen = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let cols: Vec<&str> = header.split(',').collect();
        for c in &cols {
            let (name, unit) = c.split_once(" [").unwrap_or_else(|| panic!("{}: {c}", path.display()));
            assert!(!name.is_empty() && unit.ends_with(']') && unit.len() > 1, "{c}");
        }
        let first = lines.next().unwrap_or_else(|| panic!("{} has no rows", path.display()));
        assert_eq!(first.split(',').count(), cols.len());
    }
    assert_eq!(seen, 5);
}

#[test]
fn json_numbers_carry_17_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["demo", "oscillator", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("results.json")).unwrap();
    let floats: Vec<&str> = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
        .filter(|t| t.contains('e') && t.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-'))
        .collect();
    assert!(!floats.is_empty());
    for f in floats {
        let mantissa = f.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{f}");
    }
}

#[test]
fn problems_list_and_show_emit_json() {
    let out = run(&["problems", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let list: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(list.as_array().unwrap().len(), 6);
    let out = run(&["problems", "show", "regular-slep"]);
    let spec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spec["name"], "regular-slep");
    assert_eq!(spec["problem"]["weight"]["kind"], "function");
    assert_eq!(run(&["problems", "show", "nope"]).status.code(), Some(1));
}

#[test]
fn filter_grid_writes_a_heatmap_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "filter-grid",
        "--filter",
        r#"{"kind":"disk","center":[2.5,0],"radius":2,"ell":8}"#,
        "--points",
        "11",
        "--window=-1,6,-3,3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("filter_grid.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re [1],im [1],abs_filter [1]");
    assert_eq!(lines.count(), 121);
}

#[test]
fn inline_operator_with_a_pole_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pole.json");
    std::fs::write(
        &path,
        r#"{"problem": {"domain": [-1, 1], "coefficients": ["1/(x-0.5)", 0, -1], "bcs": "dirichlet"},
            "filter": {"kind": "disk", "center": [2.5, 0], "radius": 2}}"#,
    )
    .unwrap();
    let out = run(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/(x-0.5)"));
}

#[test]
fn inline_operator_reproduces_the_catalog_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("inline-slep.json");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = in_region(&results(dir.path())["runs"][0]);
    assert_eq!(v.len(), 1);
    assert!((v[0] - 2.434680498516618).abs() <= 1e-9);
}
