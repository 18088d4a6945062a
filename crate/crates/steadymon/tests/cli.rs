// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end tests of the `steadymon` binary: exit codes, output files,
//! determinism across parallelism, and the n = 1 ensemble/trajectory
//! equivalence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use steadymon::noise::derive_trajectory_seed;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steadymon"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const QND_CHECK: &str = r#"
kind = "invariance-check"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 4.0
eta = 1.0

[assertions]
require_invariant = true
max_residual = 1e-12
"#;

#[test]
fn invariance_check_succeeds_with_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), QND_CHECK);
    let out_dir = dir.path().join("out");
    let output = bin()
        .args(["invariance-check", "-c"])
        .arg(&config)
        .arg("-o")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("verdict = invariant"));
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("metadata.json").exists());

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["verdict"], "invariant");
    assert!(summary["residual_norm"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn validation_failure_exits_1_and_lists_all_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = QND_CHECK
        .replace("eta = 1.0", "eta = 1.5")
        .replace("gamma_down = 3.0", "gamma_down = -1.0");
    let config = write_config(dir.path(), &bad);
    let output = bin().args(["invariance-check", "-c"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("monitoring.eta"), "{err}");
    assert!(err.contains("gamma_down"), "{err}");
}

#[test]
fn kind_subcommand_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), QND_CHECK);
    let output = bin().args(["ensemble", "-c"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("does not match subcommand"));
}

#[test]
fn numerical_failure_exits_2() {
    // Pure Hamiltonian model: the Liouvillian kernel is degenerate, so the
    // invariance check cannot pick a steady state.
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
kind = "invariance-check"

[model]
hamiltonian = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
jumps = []

[monitoring]
operator = "sigma_z"
gamma_m = 1.0
"#;
    let config = write_config(dir.path(), text);
    let output = bin().args(["invariance-check", "-c"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("degenerate steady state"));
}

#[test]
fn failed_assertion_exits_3_but_still_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = QND_CHECK.replace("max_residual = 1e-12", "max_residual = 1e-20");
    let config = write_config(dir.path(), &text);
    let out_dir = dir.path().join("out");
    let output = bin()
        .args(["invariance-check", "-c"])
        .arg(&config)
        .arg("-o")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("max_residual"));
    // Outputs exist for post-mortem inspection.
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["assertions"]["passed"], false);
}

#[test]
fn gamma_sweep_table_matches_rate_equation_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
kind = "gamma-sweep"

[model]
preset = "counterexample_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_x"
gamma_m = 1.0

[sweep]
gamma_m_values = [0.0, 0.4, 4.0, 40.0]
"#;
    let config = write_config(dir.path(), text);
    let out_dir = dir.path().join("out");
    let output = bin()
        .args(["gamma-sweep", "-c"])
        .arg(&config)
        .arg("-o")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let csv_text = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    let mut lines = csv_text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("gamma_m"), "{header}");
    let params = steadymon::models::QubitThermalParams::new(3.0, 1.0).unwrap();
    let mut drifts = Vec::new();
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        drifts.push(cells[1]);
        let oracle = steadymon::models::sigma_x_measured_population(&params, cells[0]);
        assert!(
            (cells[4] - oracle).abs() <= 1e-10,
            "population {} vs oracle {oracle} at gamma_m {}",
            cells[4],
            cells[0]
        );
    }
    assert_eq!(drifts.len(), 4);
    assert!(drifts.windows(2).all(|w| w[1] > w[0]), "drift not monotone: {drifts:?}");
}

const SMALL_ENSEMBLE: &str = r#"
kind = "ensemble"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 4.0
eta = 1.0

[trajectory]
dt = 0.0005
t_final = 0.5
sample_stride = 100

[ensemble]
n_trajectories = 24
base_seed = 7
observables = ["sigma_z"]
localization_observable = "sigma_z"
"#;

#[test]
fn ensemble_outputs_are_bit_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_ENSEMBLE);
    let mut bytes = Vec::new();
    for (threads, sub) in [("1", "out1"), ("4", "out4")] {
        let out_dir = dir.path().join(sub);
        let output = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args(["ensemble", "-c"])
            .arg(&config)
            .arg("-o")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
        bytes.push((
            std::fs::read(out_dir.join("summary.json")).unwrap(),
            std::fs::read(out_dir.join("timeseries.csv")).unwrap(),
        ));
    }
    assert_eq!(bytes[0].0, bytes[1].0, "summary.json differs across thread counts");
    assert_eq!(bytes[0].1, bytes[1].1, "timeseries.csv differs across thread counts");
}

#[test]
fn n1_ensemble_mean_equals_the_single_trajectory() {
    // A one-member ensemble is the degenerate case: its sigma_z mean must
    // reproduce the expectations column of the trajectory run whose seed is
    // the ensemble's derived member-0 seed.
    let dir = tempfile::tempdir().unwrap();
    let base_seed = 7u64;
    let member_seed = derive_trajectory_seed(base_seed, 0);

    let ens_text = SMALL_ENSEMBLE.replace("n_trajectories = 24", "n_trajectories = 1");
    let ens_config = write_config(dir.path(), &ens_text);
    let ens_out = dir.path().join("ens");
    let output = bin()
        .args(["ensemble", "-c"])
        .arg(&ens_config)
        .arg("-o")
        .arg(&ens_out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let traj_text = format!(
        r#"
kind = "trajectory"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 4.0
eta = 1.0

[trajectory]
dt = 0.0005
t_final = 0.5
sample_stride = 100
seed = {member_seed}
"#
    );
    let traj_dir = tempfile::tempdir().unwrap();
    let traj_config = write_config(traj_dir.path(), &traj_text);
    let traj_out = traj_dir.path().join("traj");
    let output = bin()
        .args(["trajectory", "-c"])
        .arg(&traj_config)
        .arg("-o")
        .arg(&traj_out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let parse_csv = |path: &Path| -> Vec<Vec<f64>> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect()
    };
    let ens_rows = parse_csv(&ens_out.join("timeseries.csv"));
    let traj_rows = parse_csv(&traj_out.join("timeseries.csv"));
    assert_eq!(ens_rows.len(), traj_rows.len());
    for (e, t) in ens_rows.iter().zip(&traj_rows) {
        assert_eq!(e[0], t[0], "time grids differ");
        // ensemble: time, mean_sigma_z, se, purity, uncollapse, fraction;
        // trajectory: time, expectation, purity.  CSV floats round-trip
        // exactly, so the degenerate mean is bitwise equal.
        assert_eq!(e[1], t[1], "mean differs from trajectory expectation");
        assert_eq!(e[3], t[2], "purity differs");
        assert_eq!(e[2], 0.0, "standard error must vanish for n = 1");
    }
}

#[test]
fn seed_override_changes_results_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_ENSEMBLE);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out_dir, seed_args) in
        [(&out_a, vec![]), (&out_b, vec!["--seed".to_owned(), "99".to_owned()])]
    {
        let output = bin()
            .args(["ensemble", "-c"])
            .arg(&config)
            .arg("-o")
            .arg(out_dir)
            .args(&seed_args)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_b.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 99);
    assert_ne!(
        std::fs::read(out_a.join("timeseries.csv")).unwrap(),
        std::fs::read(out_b.join("timeseries.csv")).unwrap(),
        "different base seeds must change the ensemble"
    );
}

#[test]
fn n_trajectories_override_rejected_outside_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), QND_CHECK);
    let output = bin()
        .args(["invariance-check", "--n-trajectories", "10", "-c"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("--n-trajectories"));
}

#[test]
fn repo_example_configs_parse() {
    // The committed examples double as schema documentation; they must
    // at least validate (the ensemble example is exercised at full scale
    // in the acceptance tests, not here).
    let configs_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&configs_dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e == "toml").unwrap_or(false) {
            let text = std::fs::read_to_string(&path).unwrap();
            steadymon::config::parse_config(&text)
                .unwrap_or_else(|e| panic!("{} failed to parse: {e}", path.display()));
            seen += 1;
        }
    }
    assert_eq!(seen, 4, "expected one example per experiment kind");
}
