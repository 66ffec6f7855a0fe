use std::path::Path;
use std::process::{Command, Output};

use cylq_core::classical_dynamics::TrigPotential;
use cylq_core::symbols::Observable;

fn cylq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylq")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn rieffel_on_unit_observable_has_zero_gaps() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "one.json", &Observable::one(1).to_json_string());
    write(
        dir.path(),
        "cfg.json",
        r#"{"experiment": "rieffel", "seed": 1, "observable": "one.json", "hbar_grid": [0.5, 0.25, 0.125, 0.0625, 0.03125],
            "window": {"margin": 2, "min_n": 2, "max_n": 64}, "output": {"csv": "out/r.csv", "summary": "out/r.json"}}"#,
    );
    let out = cylq(&["run", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("out/r.csv"));
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/r.json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "rieffel");
    assert_eq!(summary["pass"], true);
}

#[test]
fn counterexample_rows_are_zero_and_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cfg.json", r#"{"experiment": "counterexample", "seed": 0, "output": {"csv": "c.csv", "summary": "c.json"}}"#);
    let out = cylq(&["run", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("c.csv"));
    for r in &rows {
        let v: f64 = r[3].parse().unwrap();
        if r[1].starts_with("norm at hbar0") {
            assert!(v <= 1e-12);
        } else {
            assert!((v - 1.0).abs() <= 1e-12, "{r:?}");
        }
    }
    assert_eq!(rows.len(), 9);
}

#[test]
fn malformed_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", r#"{"experiment": "rieffel", "seed": 1,"#),
        ("unknown_field.json", r#"{"experiment": "rieffel", "seed": 1, "colour": 3, "output": {"csv": "a", "summary": "b"}}"#),
        ("missing_seed.json", r#"{"experiment": "rieffel", "output": {"csv": "a", "summary": "b"}}"#),
        ("empty_grid.json", r#"{"experiment": "rieffel", "seed": 1, "hbar_grid": [], "output": {"csv": "a", "summary": "b"}}"#),
        ("missing_file.json", r#"{"experiment": "rieffel", "seed": 1, "observable": "nope.json", "output": {"csv": "a", "summary": "b"}}"#),
        ("unknown_experiment.json", r#"{"experiment": "nope", "seed": 1, "output": {"csv": "a", "summary": "b"}}"#),
    ];
    for (name, text) in cases {
        write(dir.path(), name, text);
        let out = cylq(&["run", name], dir.path());
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = cylq(&["run", "syntax.json"], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn list_names_every_experiment() {
    let out = cylq(&["list"], Path::new("."));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rieffel"));
    assert!(text.contains("dyson"));
    assert!(text.lines().count() >= 12);
}

#[test]
fn lattice_subcommands_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = cylq(&["lattice", "extend", "--n", "3", "--vectors", "2,3,0;0,0,1", "--out", "b.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(v["det"].as_i64().unwrap().abs(), 1);
    let out = cylq(&["lattice", "period", "--numerator", "2,-4", "--denominator", "3"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["numerator"].as_i64(), v["denominator"].as_i64()), (Some(3), Some(2)));
    let out = cylq(&["lattice", "extend", "--n", "2", "--vectors", "2,4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", r#"{"experiment": "structure", "seed": 11, "output": {"csv": "a.csv", "summary": "a.s.json"}}"#);
    write(dir.path(), "b.json", r#"{"experiment": "structure", "seed": 11, "output": {"csv": "b.csv", "summary": "b.s.json"}}"#);
    assert_eq!(cylq(&["run", "a.json"], dir.path()).status.code(), Some(0));
    assert_eq!(cylq(&["run", "b.json"], dir.path()).status.code(), Some(0));
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.s.json"), read("b.s.json"));
}

#[test]
fn quantize_writes_manifest_and_diagonals() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f.json", &Observable::sine(1, 0.3).to_json_string());
    let out = cylq(&["quantize", "--observable", "f.json", "--hbar", "0.3", "--window", "3", "--out", "op.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("op.json")).unwrap()).unwrap();
    let terms = m["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    for t in terms {
        let rows = csv_rows(&dir.path().join(t["diag_ref"].as_str().unwrap()));
        assert_eq!(rows.len(), 7);
    }
}

#[test]
fn check_and_dynamics_subcommands_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "one.json", &Observable::one(1).to_json_string());
    write(dir.path(), "v.json", &TrigPotential::cosine(vec![1], 1.0).unwrap().to_json_string());
    let out = cylq(&["check", "star", "--observable", "one.json", "--hbar-grid", "0.5,0.25", "--out", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("hbar,value,N,method\n"));
    assert_eq!(csv_rows(&dir.path().join("s.csv")).len(), 2);

    let out = cylq(&["flow", "--potential", "v.json", "--q", "0.1", "--p", "-0.3", "--t", "1", "--out", "f.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("f.csv"));
    let e: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(e.iter().all(|x| (x - e[0]).abs() < 1e-3));

    let out = cylq(&["fejer", "--orders", "4,8", "--points", "256", "--out", "fe.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("fe.csv")).len(), 2);

    let out = cylq(
        &["dyson", "--potential", "v.json", "--t", "0.5", "--hbar", "1", "--window", "8", "--order", "3", "--out", "d.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let d: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    for key in ["residual", "remainder_bound", "quadrature_error", "wall_time_s"] {
        assert!(d.get(key).is_some(), "{key}");
    }
    assert!(d["residual"].as_f64().unwrap() <= d["remainder_bound"].as_f64().unwrap());
}
