//! End-to-end checks of the `qwflow` binary: output contracts, config
//! precedence, exit codes, and cross-agreement between subcommands.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qwflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwflow"))
        .args(args)
        .output()
        .expect("failed to spawn qwflow")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is not valid JSON")
}

#[test]
fn simulate_writes_the_reference_dataset_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("run1.csv");
    let second = dir.path().join("run2.csv");

    let out = qwflow(&[
        "simulate", "--n", "100", "--t-max", "460", "--format", "csv",
        "--output", first.to_str().unwrap(),
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["command"], "simulate");
    assert_eq!(summary["method"], "full");
    assert_eq!(summary["results"]["rows"], 461);

    let text = fs::read_to_string(&first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 462); // header + 461 data rows
    assert_eq!(lines[0], "t,nu_marked,nu_unmarked,norm_kn");

    let rerun = qwflow(&[
        "simulate", "--n", "100", "--t-max", "460", "--format", "csv",
        "--output", second.to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn csv_output_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let out = qwflow(&[
        "reduced", "--n", "10", "--t-max", "30",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let text = fs::read_to_string(&path).unwrap();
    let parsed = qwflow_core::export::parse_series_csv(&text, 10).unwrap();
    assert_eq!(qwflow_core::export::series_to_csv(&parsed).unwrap(), text);
}

#[test]
fn series_goes_to_stdout_without_output_flag() {
    let out = qwflow(&["reduced", "--n", "10", "--t-max", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "t,nu_marked,nu_unmarked,norm_kn");
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(qwflow(&["simulate"]).status.code(), Some(2)); // missing --n
    assert_eq!(qwflow(&["simulate", "--n"]).status.code(), Some(2));
    assert_eq!(qwflow(&["simulate", "--n", "10", "--bogus"]).status.code(), Some(2));
    assert_eq!(qwflow(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        qwflow(&["mixing-time", "--n", "100", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qwflow(&["simulate", "--n", "2"]).status.code(),
        Some(2) // below the smallest admissible graph
    );
}

#[test]
fn numeric_failures_exit_with_3() {
    // an eps sweep without a decade of span cannot support the fit
    let out = qwflow(&[
        "spectrum", "--n", "100", "--eps-list", "0.01,0.02,0.03,0.04",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn io_failures_exit_with_4() {
    let out = qwflow(&[
        "reduced", "--n", "10", "--output", "/nonexistent-qwflow-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let missing_config = qwflow(&["reduced", "--n", "10", "--config", "/no/such/config.json"]);
    assert_eq!(missing_config.status.code(), Some(4));
}

#[test]
fn config_file_is_merged_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"n": 10, "t_max": 5}"#).unwrap();

    let from_file = qwflow(&["reduced", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    let lines = String::from_utf8(from_file.stdout).unwrap().lines().count();
    assert_eq!(lines, 7); // header + t = 0..=5

    let overridden = qwflow(&[
        "reduced", "--config", cfg.to_str().unwrap(), "--t-max", "3",
    ]);
    assert!(overridden.status.success());
    let lines = String::from_utf8(overridden.stdout).unwrap().lines().count();
    assert_eq!(lines, 5); // flag wins over file

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 10, "bogus": 1}"#).unwrap();
    assert_eq!(
        qwflow(&["reduced", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn mixing_time_emits_the_summary_schema() {
    let out = qwflow(&["mixing-time", "--n", "100", "--theta", "3"]);
    let doc = stdout_json(&out);
    let mut keys: Vec<&str> = doc.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(keys, vec!["command", "method", "params", "results", "tool_version"]);
    assert_eq!(doc["command"], "mixing-time");
    assert_eq!(doc["method"], "reduced");
    assert_eq!(doc["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["params"]["theta"], 3.0);

    let results = &doc["results"];
    assert_eq!(results["n_vertices"], 100);
    assert_eq!(results["converged"], true);
    let t_theta = results["t_theta"].as_u64().unwrap();
    assert!((368..=372).contains(&t_theta), "t_theta = {t_theta}");
}

#[test]
fn pulsation_reports_the_known_peaks() {
    let out = qwflow(&["pulsation", "--n", "100"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["results"]["peak_times"], serde_json::json!([20, 64, 108]));
    assert_eq!(doc["results"]["fitted_period"], 44.0);
    assert_eq!(doc["params"]["window"], 23);
}

#[test]
fn spectrum_fits_recover_the_series_coefficients() {
    let eps_list = "0.001,0.001232,0.001518,0.00187,0.002304,0.002839,\
                    0.003498,0.00431,0.00531,0.006543,0.008061,0.01";
    let out = qwflow(&["spectrum", "--n", "100", "--eps-list", eps_list]);
    let doc = stdout_json(&out);
    assert_eq!(doc["method"], "closed-form");
    let fits = &doc["results"]["fits"];
    assert!((fits["minus1"]["coeff2"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-2);
    assert!((fits["plus1_pos"]["coeff1"]["im"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!((fits["plus1_neg"]["coeff1"]["im"].as_f64().unwrap() + 1.0).abs() < 1e-3);
    let radius = doc["results"]["spectral_radius"].as_f64().unwrap();
    assert!(radius < 1.0);
}

#[test]
fn sweep_collects_one_row_per_size() {
    let out = qwflow(&[
        "sweep", "--command", "mixing-time", "--n-list", "50,100",
        "--theta", "3", "--jobs", "2",
    ]);
    let doc = stdout_json(&out);
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n_vertices"], 50);
    assert_eq!(rows[1]["n_vertices"], 100);
    for row in rows {
        assert!(row["ratio"].as_f64().unwrap() > 0.0);
        assert_eq!(row["converged"], true);
    }
    assert!(doc["results"]["max_ratio_deviation"].as_f64().unwrap() < 0.25);

    assert_eq!(
        qwflow(&["sweep", "--command", "bogus", "--n-list", "10"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_and_reduced_traces_agree() {
    let dir = tempfile::tempdir().unwrap();
    let full_path = dir.path().join("full.csv");
    let reduced_path = dir.path().join("reduced.csv");
    assert!(qwflow(&[
        "simulate", "--n", "10", "--t-max", "30",
        "--output", full_path.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(qwflow(&[
        "reduced", "--n", "10", "--t-max", "30",
        "--output", reduced_path.to_str().unwrap(),
    ])
    .status
    .success());

    let full = qwflow_core::export::parse_series_csv(
        &fs::read_to_string(&full_path).unwrap(), 10).unwrap();
    let reduced = qwflow_core::export::parse_series_csv(
        &fs::read_to_string(&reduced_path).unwrap(), 10).unwrap();
    for (f, r) in full.records.iter().zip(&reduced.records) {
        assert!(
            (f.nu_marked - r.nu_marked).abs() < 1e-9,
            "traces diverge at t = {}",
            f.t
        );
    }
}
