//! End-to-end checks of the command-line interface: exit codes, output
//! files, and reproducibility of reports.

use std::path::Path;
use std::process::{Command, Output};

fn hellest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hellest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_sample(dir: &Path, name: &str, values: &[f64]) -> String {
    let path = dir.join(name);
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn estimate_prints_theta_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "s.txt", &[0.4, -0.3, 0.8, 0.1, -0.6, 0.2]);
    let out = hellest(&["estimate", "--model", "gauss-loc", "--data", &data]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("theta_hat"));
    assert!(stdout.contains("tests"));
}

#[test]
fn estimate_writes_json_result() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "s.txt", &[0.9, 1.2, 0.8, 1.1]);
    let json_path = dir.path().join("result.json");
    let out = hellest(&[
        "estimate",
        "--model",
        "exp-rate",
        "--data",
        &data,
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(parsed["model"], "exp-rate");
    assert!(parsed["theta_hat"][0].as_f64().unwrap() > 0.0);
    assert!(parsed["test_count"].as_u64().unwrap() > 0);
}

#[test]
fn missing_data_file_exits_2_with_path() {
    let out = hellest(&["estimate", "--model", "gauss-loc", "--data", "/nonexistent/y.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/y.txt"));
}

#[test]
fn oversized_kappa_exits_2_and_cites_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "s.txt", &[0.1, 0.5]);
    let out = hellest(&["estimate", "--model", "gauss-loc", "--data", &data, "--kappa", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("0.0857864"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unknown_model_and_scenario_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "s.txt", &[0.1]);
    let out = hellest(&["estimate", "--model", "unknown", "--data", &data]);
    assert_eq!(out.status.code(), Some(2));

    let out = hellest(&["simulate", "--scenario", "nope", "--reps", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
}

#[test]
fn simulate_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = hellest(&[
            "simulate",
            "--scenario",
            "table4-ex7",
            "--n",
            "25",
            "--reps",
            "20",
            "--seed",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(dir.path().join("table4-ex7.csv")).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert!(a.starts_with("scenario,model,estimator,n,reps,failures,risk,std,rel_risk"));
    assert!(a.contains("table4-ex7,unif-loc,ours,25,20,"));
    assert!(a.contains("midrange"));
}

#[test]
fn simulate_accepts_json_run_spec_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("run.json");
    std::fs::write(
        &spec,
        r#"{ "scenario": "table4-ex2", "n": [10], "reps": 50, "seed": 3 }"#,
    )
    .unwrap();
    let out = hellest(&[
        "simulate",
        "--scenario",
        spec.to_str().unwrap(),
        "--reps",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("table4-ex2.csv")).unwrap();
    // The flag overrides the file's replication count.
    assert!(csv.contains("table4-ex2,gauss-loc,ours,10,10,"), "{csv}");
}

#[test]
fn mixture_sweep_emits_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = hellest(&[
        "simulate",
        "--scenario",
        "mixture-uniform",
        "--reps",
        "10",
        "--n",
        "50",
        "--p-steps",
        "4",
        "--seed",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("mixture-uniform.csv")).unwrap();
    assert!(csv.starts_with("p,risk_ours,risk_mle,h2_model\n"));
    assert_eq!(csv.lines().count(), 1 + 5);
}

#[test]
fn theory_reports_bounds() {
    let out = hellest(&["theory", "--model", "gauss-loc", "--t", "1"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("alpha_bar"));
    assert!(stdout.contains("test bound 1d"));
}

#[test]
fn models_lists_catalog() {
    let out = hellest(&["models"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in hellest::CATALOG_NAMES {
        assert!(stdout.contains(name), "missing {name}");
    }
    assert!(stdout.contains("contam-uniform"));
}
