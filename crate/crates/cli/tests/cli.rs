use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capillary1d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

fn write_config(dir: &Path, value: &Value) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

#[test]
fn flat_film_keeps_its_mass() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({
            "schema_version": 1,
            "domain": {"l": 1.0, "N": 8},
            "model": {"n": 2.0, "delta": 0.1, "epsilon": 0.1, "eta": 0.0},
            "integrator": {"T": 0.05, "snapshots": 3},
            "initial_data": {"kind": "constant", "parameters": {"value": 0.8}}
        }),
    );
    let out = tmp.path().join("out");
    let o = cli(&["simulate", "--config", path(&config), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let series = std::fs::read_to_string(out.join("series.csv")).unwrap();
    let mass = column(&series, "mass");
    assert_eq!(mass.len(), 4);
    assert!(mass.iter().all(|m| *m == mass[0]));
    assert!((mass[0] - 1.6).abs() < 1e-14);
    for i in 0..4 {
        assert!(out.join(format!("snap_{i}.csv")).exists());
    }
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["verdicts"]["mass_conserved"], json!(true));
}

#[test]
fn missing_config_reports_json_error() {
    let o = cli(&[
        "simulate",
        "--config",
        "/nonexistent/config.json",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["exit_code"], json!(2));
    assert!(err["message"].as_str().unwrap().contains("config.json"));
}

#[test]
fn invalid_parameters_are_rejected() {
    let o = cli(&["simulate", "--set", "model.delta=2", "--out", "/tmp/unused"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&[
        "simulate",
        "--set",
        "model.unknown=1",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resolved_config_reproduces_the_series() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let o = cli(&[
        "simulate",
        "--set",
        "integrator.T=0.005",
        "--set",
        "domain.N=8",
        "--out",
        path(&first),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("summary.json")).unwrap())
            .unwrap();
    let config = write_config(tmp.path(), &summary["config"]);
    let second = tmp.path().join("second");
    let o = cli(&[
        "simulate",
        "--config",
        path(&config),
        "--out",
        path(&second),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(first.join("series.csv")).unwrap(),
        std::fs::read(second.join("series.csv")).unwrap()
    );
}

#[test]
fn compare_and_thresholds_write_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cli(&["compare", "--out", path(tmp.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "profile_report.json",
        "profile_nonlinear.csv",
        "profile_linear.csv",
    ] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let o = cli(&[
        "thresholds",
        "--n-values",
        "1.5,3",
        "--set",
        "integrator.T=0.005",
        "--out",
        path(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("thresholds_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 2);
    assert!(tmp.path().join("thresholds.csv").exists());
}

#[test]
fn delta_sweep_writes_a_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cli(&[
        "sweep",
        "--param",
        "delta",
        "--values",
        "0.3,0.1,0.03",
        "--set",
        "integrator.T=0.005",
        "--set",
        "domain.N=8",
        "--out",
        path(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("sweep_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["parameter"], json!("delta"));
    assert_eq!(report["members"].as_array().unwrap().len(), 3);
    assert_eq!(report["l2_differences"].as_array().unwrap().len(), 2);
    assert!(tmp.path().join("sweep_members.csv").exists());

    let o = cli(&["sweep", "--param", "gamma", "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
}
