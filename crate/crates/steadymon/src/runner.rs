// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment execution and output writing for the CLI.
//!
//! A run produces up to three files in the output directory:
//!
//! * `summary.json` — inputs echoed verbatim plus residuals, drifts,
//!   verdicts, and assertion results;
//! * `timeseries.csv` — one self-describing delimited table (one row per
//!   sampled time, or per sweep point for gamma sweeps);
//! * `metadata.json` — timestamp, config hash, seed, software version.
//!
//! `summary.json` and `timeseries.csv` are byte-deterministic for a
//! given config regardless of thread count; everything
//! run-environment-specific (the timestamp) is quarantined in
//! `metadata.json`.

use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{operator_to_rows, ExperimentConfig, ExperimentKind, InitialState};
use crate::ensemble::{dissipative_uncollapse_metric, run_ensemble, EnsembleStats};
use crate::error::{Error, Result};
use crate::lindblad::steady_state;
use crate::monitor::{gamma_sweep, invariance_check};
use crate::operator::DensityMatrix;
use crate::trajectory::{simulate_trajectory, TrajectoryPath};

/// A self-describing delimited table: `headers[k]` names (with units)
/// the values in column k of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names with units, e.g. `"time [arb. units]"`.
    pub headers: Vec<String>,
    /// One row per sampled time (or sweep point).
    pub rows: Vec<Vec<f64>>,
}

/// Everything a run produced, before any file is written.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    /// The `summary.json` document.
    pub summary: Value,
    /// The `timeseries.csv` table, for kinds that produce one.
    pub table: Option<Table>,
    /// Configured assertion bounds that were violated (empty = pass).
    pub assertion_failures: Vec<String>,
}

impl RunArtifacts {
    /// The CLI exit-3 error, if any configured assertion failed.
    pub fn assertion_error(&self) -> Option<Error> {
        if self.assertion_failures.is_empty() {
            None
        } else {
            Some(Error::AssertionFailed { failures: self.assertion_failures.clone() })
        }
    }
}

/// Resolves the configured initial state against the model.
///
/// `Steady` prefers the preset's closed form and falls back to the
/// nullspace solve (failing with the solver's error if the unmonitored
/// steady state is not unique).
pub fn resolve_initial_state(config: &ExperimentConfig) -> Result<DensityMatrix> {
    let dim = config.model.model.dim();
    match &config.initial_state {
        InitialState::Steady => match &config.model.analytic_steady_state {
            Some(rho) => Ok(rho.clone()),
            None => steady_state(&config.model.model),
        },
        InitialState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(dim)),
        InitialState::Ground => DensityMatrix::basis_state(dim, 0),
        InitialState::Excited => DensityMatrix::basis_state(dim, dim - 1),
        InitialState::Explicit(rho) => Ok(rho.clone()),
    }
}

/// Runs the configured experiment and assembles its outputs in memory.
///
/// Module errors propagate with their own context (exit code 2 for
/// numerical failures); assertion violations do *not* error here — they
/// are recorded in the artifacts so outputs can still be written, and
/// [`RunArtifacts::assertion_error`] converts them for the exit path.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    match config.kind {
        ExperimentKind::InvarianceCheck => run_invariance_check(config),
        ExperimentKind::GammaSweep => run_gamma_sweep(config),
        ExperimentKind::Trajectory => run_trajectory(config),
        ExperimentKind::Ensemble => run_ensemble_kind(config),
    }
}

fn echo_json(config: &ExperimentConfig) -> Value {
    serde_json::to_value(&config.echo).expect("TOML value converts to JSON")
}

fn state_json(rho: &DensityMatrix) -> Value {
    serde_json::to_value(operator_to_rows(rho.operator())).expect("nested rows convert")
}

fn assertions_json(checked: usize, failures: &[String]) -> Value {
    json!({
        "checked": checked,
        "failures": failures,
        "passed": failures.is_empty(),
    })
}

fn run_invariance_check(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let report = invariance_check(
        &config.model.model,
        config.monitoring.c(),
        config.invariance_tolerance,
    )?;
    let verdict = if report.invariant { "invariant" } else { "not-invariant" };

    let mut checked = 0;
    let mut failures = Vec::new();
    if let Some(expected) = config.assertions.require_invariant {
        checked += 1;
        if report.invariant != expected {
            failures.push(format!(
                "require_invariant: verdict is \"{verdict}\", expected invariant = {expected}"
            ));
        }
    }
    if let Some(bound) = config.assertions.max_residual {
        checked += 1;
        if !(report.residual_norm <= bound) {
            failures.push(format!(
                "max_residual: residual_norm {:.6e} > {bound:.6e}",
                report.residual_norm
            ));
        }
    }

    let summary = json!({
        "kind": "invariance-check",
        "config": echo_json(config),
        "residual_norm": report.residual_norm,
        "tolerance": report.tolerance,
        "invariant": report.invariant,
        "verdict": verdict,
        "steady_state": state_json(&report.steady_state_used),
        "assertions": assertions_json(checked, &failures),
    });
    Ok(RunArtifacts { summary, table: None, assertion_failures: failures })
}

fn run_gamma_sweep(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let gammas = config
        .sweep_gammas
        .as_ref()
        .expect("validated gamma-sweep config carries sweep_gammas");
    let points = gamma_sweep(&config.model.model, config.monitoring.c(), gammas)?;
    let dim = config.model.model.dim();

    let mut headers = vec![
        "gamma_m [1/time]".to_owned(),
        "drift [dimensionless]".to_owned(),
        "purity [dimensionless]".to_owned(),
    ];
    for k in 0..dim {
        headers.push(format!("population_{k} [dimensionless]"));
    }

    let mut rows = Vec::with_capacity(points.len());
    let mut point_docs = Vec::with_capacity(points.len());
    let mut max_drift: Option<f64> = None;
    let mut n_failed = 0usize;
    let mut failures = Vec::new();
    let drift_bound = config.assertions.max_drift;

    for point in &points {
        match &point.outcome {
            Ok(outcome) => {
                let mut row = vec![point.gamma_m, outcome.drift, outcome.steady_state.purity()];
                for k in 0..dim {
                    row.push(outcome.steady_state.operator().get(k, k).re);
                }
                rows.push(row);
                max_drift = Some(max_drift.map_or(outcome.drift, |m| m.max(outcome.drift)));
                point_docs.push(json!({
                    "gamma_m": point.gamma_m,
                    "drift": outcome.drift,
                    "steady_state": state_json(&outcome.steady_state),
                    "error": Value::Null,
                }));
                if let Some(bound) = drift_bound {
                    if !(outcome.drift <= bound) {
                        failures.push(format!(
                            "max_drift: drift {:.6e} > {bound:.6e} at gamma_m = {}",
                            outcome.drift, point.gamma_m
                        ));
                    }
                }
            }
            Err(e) => {
                n_failed += 1;
                let mut row = vec![point.gamma_m];
                row.extend(std::iter::repeat(f64::NAN).take(headers.len() - 1));
                rows.push(row);
                point_docs.push(json!({
                    "gamma_m": point.gamma_m,
                    "drift": Value::Null,
                    "steady_state": Value::Null,
                    "error": e.to_string(),
                }));
                if drift_bound.is_some() {
                    failures.push(format!(
                        "max_drift: no steady state at gamma_m = {} ({e})",
                        point.gamma_m
                    ));
                }
            }
        }
    }

    let checked = usize::from(drift_bound.is_some());
    let summary = json!({
        "kind": "gamma-sweep",
        "config": echo_json(config),
        "points": point_docs,
        "max_drift": max_drift,
        "n_points": points.len(),
        "n_failed_points": n_failed,
        "assertions": assertions_json(checked, &failures),
    });
    Ok(RunArtifacts {
        summary,
        table: Some(Table { headers, rows }),
        assertion_failures: failures,
    })
}

fn record_stats(path: &TrajectoryPath) -> (usize, f64, f64) {
    let n = path.record.increments.len();
    if n == 0 {
        return (0, 0.0, 0.0);
    }
    let mean = path.record.increments.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        path.record.increments.iter().map(|dy| (dy - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    (n, mean, var)
}

fn run_trajectory(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let traj = config
        .trajectory
        .as_ref()
        .expect("validated trajectory config carries the section");
    let rho0 = resolve_initial_state(config)?;
    let path = simulate_trajectory(&rho0, &config.model.model, &config.monitoring, traj)?;

    let headers = vec![
        "time [arb. units]".to_owned(),
        "expectation [dimensionless]".to_owned(),
        "purity [dimensionless]".to_owned(),
    ];
    let rows: Vec<Vec<f64>> = path
        .times
        .iter()
        .zip(&path.expectations)
        .zip(&path.states)
        .map(|((&t, &x), state)| vec![t, x, state.purity()])
        .collect();

    let (n_inc, rec_mean, rec_var) = record_stats(&path);
    let final_state = path.states.last().expect("trajectory samples t = 0");
    let summary = json!({
        "kind": "trajectory",
        "config": echo_json(config),
        "n_steps": traj.n_steps(),
        "n_samples": path.times.len(),
        "final_time": path.times.last().copied(),
        "final_expectation": path.expectations.last().copied(),
        "final_purity": final_state.purity(),
        "final_state": state_json(final_state),
        "record": {
            "n_increments": n_inc,
            "dt": path.record.dt,
            "mean": rec_mean,
            "variance": rec_var,
        },
        "assertions": assertions_json(0, &[]),
    });
    Ok(RunArtifacts {
        summary,
        table: Some(Table { headers, rows }),
        assertion_failures: Vec::new(),
    })
}

fn run_ensemble_kind(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let ens = config
        .ensemble
        .as_ref()
        .expect("validated ensemble config carries the section");
    let rho0 = resolve_initial_state(config)?;
    let stats = run_ensemble(&rho0, &config.model.model, &config.monitoring, ens)?;

    // Uncollapse reference: the *unmonitored* steady state.  A model
    // without a unique one (e.g. pure measurement, no dissipation) still
    // runs; the metric is simply unavailable.
    let (reference, reference_kind) = match &config.model.analytic_steady_state {
        Some(rho) => (Ok(rho.clone()), "analytic"),
        None => (steady_state(&config.model.model), "numerical"),
    };
    let (uncollapse, reference_doc) = match &reference {
        Ok(rho) => (
            Some(dissipative_uncollapse_metric(&stats, rho)?),
            json!({ "kind": reference_kind, "state": state_json(rho) }),
        ),
        Err(e) => (None, json!({ "kind": Value::Null, "unavailable": e.to_string() })),
    };

    let localized_fraction = if stats.localization.is_some() {
        Some(crate::ensemble::bimodality_report(&stats, config.localization_threshold)?)
    } else {
        None
    };

    let table = ensemble_table(&stats, uncollapse.as_deref(), localized_fraction.as_deref());
    let failures = ensemble_assertions(config, &stats, uncollapse.as_deref());
    let checked = usize::from(config.assertions.max_uncollapse.is_some())
        + usize::from(config.assertions.min_final_purity.is_some());

    let observables_doc: Vec<Value> = stats
        .observable_means
        .iter()
        .map(|series| {
            json!({
                "name": series.name,
                "final_mean": series.mean.last().copied(),
                "final_std_error": series.std_error.last().copied(),
            })
        })
        .collect();
    let histogram_doc = stats.localization_histogram.as_ref().map_or(Value::Null, |h| {
        json!({ "time": h.time, "edges": h.edges, "counts": h.counts })
    });
    let max_uncollapse_seen = uncollapse
        .as_deref()
        .map(|d| d.iter().copied().fold(0.0f64, f64::max));

    let summary = json!({
        "kind": "ensemble",
        "config": echo_json(config),
        "n_trajectories": stats.n_trajectories,
        "n_aborted": stats.n_aborted,
        "final_time": stats.times.last().copied(),
        "final_purity_mean": stats.purity_mean.last().copied(),
        "final_mean_state": stats.mean_state.last().map(state_json),
        "observables": observables_doc,
        "uncollapse": {
            "reference": reference_doc,
            "max": max_uncollapse_seen,
            "final": uncollapse.as_deref().and_then(|d| d.last().copied()),
        },
        "localization": {
            "threshold": config.localization_threshold,
            "final_fraction": localized_fraction.as_deref().and_then(|f| f.last().copied()),
            "histogram": histogram_doc,
        },
        "assertions": assertions_json(checked, &failures),
    });
    Ok(RunArtifacts { summary, table: Some(table), assertion_failures: failures })
}

fn ensemble_table(
    stats: &EnsembleStats,
    uncollapse: Option<&[f64]>,
    localized_fraction: Option<&[f64]>,
) -> Table {
    let mut headers = vec!["time [arb. units]".to_owned()];
    for series in &stats.observable_means {
        headers.push(format!("mean_{} [dimensionless]", series.name));
        headers.push(format!("se_{} [dimensionless]", series.name));
    }
    headers.push("purity_mean [dimensionless]".to_owned());
    if uncollapse.is_some() {
        headers.push("uncollapse_metric [dimensionless]".to_owned());
    }
    if localized_fraction.is_some() {
        headers.push("localized_fraction [dimensionless]".to_owned());
    }

    let rows = (0..stats.times.len())
        .map(|i| {
            let mut row = vec![stats.times[i]];
            for series in &stats.observable_means {
                row.push(series.mean[i]);
                row.push(series.std_error[i]);
            }
            row.push(stats.purity_mean[i]);
            if let Some(d) = uncollapse {
                row.push(d[i]);
            }
            if let Some(f) = localized_fraction {
                row.push(f[i]);
            }
            row
        })
        .collect();
    Table { headers, rows }
}

fn ensemble_assertions(
    config: &ExperimentConfig,
    stats: &EnsembleStats,
    uncollapse: Option<&[f64]>,
) -> Vec<String> {
    let mut failures = Vec::new();
    if let Some(bound) = config.assertions.max_uncollapse {
        match uncollapse {
            None => failures.push(
                "max_uncollapse: no unique unmonitored steady state to reference".to_owned(),
            ),
            Some(d) => {
                let worst = d.iter().copied().fold(0.0f64, f64::max);
                if !(worst <= bound) {
                    failures
                        .push(format!("max_uncollapse: metric peak {worst:.6e} > {bound:.6e}"));
                }
            }
        }
    }
    if let Some(bound) = config.assertions.min_final_purity {
        let last = stats.purity_mean.last().copied().unwrap_or(0.0);
        if !(last >= bound) {
            failures.push(format!("min_final_purity: final purity {last:.6} < {bound:.6}"));
        }
    }
    failures
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Writes `summary.json`, `timeseries.csv` (when produced and enabled),
/// and `metadata.json` into `dir`, creating it if needed.
///
/// The metadata file carries the only timestamp; `config_text` is hashed
/// exactly as given (bytes, not reformatted).
pub fn write_outputs(
    artifacts: &RunArtifacts,
    config: &ExperimentConfig,
    config_text: &str,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let summary_path = dir.join("summary.json");
    let mut summary_bytes =
        serde_json::to_vec_pretty(&artifacts.summary).expect("summary serializes");
    summary_bytes.push(b'\n');
    std::fs::write(&summary_path, summary_bytes).map_err(|e| io_err(&summary_path, e))?;

    if config.output.write_timeseries {
        if let Some(table) = &artifacts.table {
            let ts_path = dir.join("timeseries.csv");
            let mut writer = csv::Writer::from_path(&ts_path).map_err(|e| io_err(&ts_path, e))?;
            writer.write_record(&table.headers).map_err(|e| io_err(&ts_path, e))?;
            for row in &table.rows {
                writer.serialize(row).map_err(|e| io_err(&ts_path, e))?;
            }
            writer.flush().map_err(|e| io_err(&ts_path, e))?;
        }
    }

    let seed = match config.kind {
        ExperimentKind::Ensemble => config.ensemble.as_ref().map(|e| e.base_seed()),
        ExperimentKind::Trajectory => config.trajectory.as_ref().map(|t| t.seed()),
        _ => None,
    };
    let metadata = json!({
        "config_sha256": hex::encode(Sha256::digest(config_text.as_bytes())),
        "generated_at": chrono::Utc::now().to_rfc3339(),
        "seed": seed,
        "software": {
            "name": "steadymon",
            "version": env!("CARGO_PKG_VERSION"),
        },
    });
    let meta_path = dir.join("metadata.json");
    let mut meta_bytes = serde_json::to_vec_pretty(&metadata).expect("metadata serializes");
    meta_bytes.push(b'\n');
    std::fs::write(&meta_path, meta_bytes).map_err(|e| io_err(&meta_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use approx::assert_abs_diff_eq;

    fn run_text(text: &str) -> RunArtifacts {
        run_experiment(&parse_config(text).unwrap()).unwrap()
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
"#;

    #[test]
    fn qnd_invariance_check_reports_invariant() {
        let artifacts = run_text(QND_CHECK);
        let s = &artifacts.summary;
        assert_eq!(s["verdict"], "invariant");
        assert!(s["residual_norm"].as_f64().unwrap() <= 1e-12);
        assert!(artifacts.table.is_none());
        assert!(artifacts.assertion_failures.is_empty());
        assert!(artifacts.assertion_error().is_none());
        // The config is echoed verbatim.
        assert_eq!(s["config"]["model"]["gamma_down"], 3.0);
    }

    #[test]
    fn counterexample_check_reports_not_invariant_and_assertion_can_require_that() {
        let text = r#"
kind = "invariance-check"

[model]
preset = "counterexample_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_x"
gamma_m = 4.0

[assertions]
require_invariant = false
"#;
        let artifacts = run_text(text);
        assert_eq!(artifacts.summary["verdict"], "not-invariant");
        assert_abs_diff_eq!(
            artifacts.summary["residual_norm"].as_f64().unwrap(),
            std::f64::consts::SQRT_2 / 2.0,
            epsilon = 1e-12
        );
        assert!(artifacts.assertion_failures.is_empty());
    }

    #[test]
    fn failed_assertion_is_recorded_not_propagated() {
        let text = format!("{QND_CHECK}\n[assertions]\nrequire_invariant = false\n");
        let artifacts = run_text(&text);
        assert_eq!(artifacts.assertion_failures.len(), 1);
        assert!(artifacts.assertion_failures[0].contains("require_invariant"));
        assert_eq!(artifacts.summary["assertions"]["passed"], false);
        let err = artifacts.assertion_error().unwrap();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn gamma_sweep_on_counterexample_has_monotone_nonzero_drift() {
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
gamma_m_values = [0.0, 0.4, 2.0, 4.0, 40.0]
"#;
        let artifacts = run_text(text);
        let table = artifacts.table.as_ref().unwrap();
        assert_eq!(table.headers[0], "gamma_m [1/time]");
        assert_eq!(table.rows.len(), 5);
        let drifts: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
        assert_abs_diff_eq!(drifts[0], 0.0, epsilon = 1e-12);
        for pair in drifts.windows(2) {
            assert!(pair[1] > pair[0], "drift not monotone: {drifts:?}");
        }
        // Rate-equation oracle: excited population at each sweep point.
        let p =
            crate::models::QubitThermalParams::new(3.0, 1.0).unwrap();
        for row in &table.rows {
            let oracle = crate::models::sigma_x_measured_population(&p, row[0]);
            assert_abs_diff_eq!(row[4], oracle, epsilon = 1e-10);
        }
        assert_eq!(artifacts.summary["n_failed_points"], 0);
    }

    #[test]
    fn trajectory_run_produces_aligned_table_and_record_stats() {
        let text = r#"
kind = "trajectory"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 1.0
eta = 1.0

[trajectory]
dt = 0.001
t_final = 1.0
seed = 7
sample_stride = 100
"#;
        let artifacts = run_text(text);
        let table = artifacts.table.as_ref().unwrap();
        assert_eq!(table.rows.len(), 11); // t = 0 plus 10 strides
        assert_eq!(table.headers.len(), 3);
        for row in &table.rows {
            assert!(row[1].abs() <= 1.0 + 1e-9, "expectation out of range: {row:?}");
            assert!(row[2] <= 1.0 + 1e-12 && row[2] >= 0.5 - 1e-12);
        }
        assert_eq!(artifacts.summary["n_steps"], 1000);
        assert_eq!(artifacts.summary["record"]["n_increments"], 1000);
        // dY ≈ dW at weak signal: variance per increment ≈ dt.
        let var = artifacts.summary["record"]["variance"].as_f64().unwrap();
        assert!((var - 0.001).abs() < 0.0003, "record variance {var}");
    }

    #[test]
    fn ensemble_run_emits_uncollapse_and_localization_columns() {
        let text = r#"
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
n_trajectories = 60
base_seed = 9
observables = ["sigma_z"]
localization_observable = "sigma_z"

[assertions]
max_uncollapse = 0.4
min_final_purity = 0.5
"#;
        let artifacts = run_text(text);
        let table = artifacts.table.as_ref().unwrap();
        assert_eq!(
            table.headers,
            vec![
                "time [arb. units]",
                "mean_sigma_z [dimensionless]",
                "se_sigma_z [dimensionless]",
                "purity_mean [dimensionless]",
                "uncollapse_metric [dimensionless]",
                "localized_fraction [dimensionless]",
            ]
        );
        assert_eq!(table.rows.len(), 11);
        // Started at the steady state, the QND ensemble stays at the noise
        // floor: d(0) = 0 exactly, d(t) small.
        assert_eq!(table.rows[0][4], 0.0);
        assert!(artifacts.assertion_failures.is_empty(), "{:?}", artifacts.assertion_failures);
        assert_eq!(artifacts.summary["n_aborted"], 0);
        assert_eq!(artifacts.summary["uncollapse"]["reference"]["kind"], "analytic");
        assert!(artifacts.summary["localization"]["histogram"]["counts"].is_array());
    }

    #[test]
    fn pure_measurement_ensemble_runs_without_uncollapse_reference() {
        // No dissipation: the bare model has no unique steady state, so the
        // uncollapse metric is unavailable but the run must still succeed.
        let text = r#"
kind = "ensemble"

[model]
hamiltonian = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
jumps = []

[monitoring]
operator = "sigma_z"
gamma_m = 5.0
eta = 1.0

[trajectory]
dt = 0.0001
t_final = 0.3
sample_stride = 300
initial_state = "maximally-mixed"

[ensemble]
n_trajectories = 40
base_seed = 3
observables = ["sigma_z"]
"#;
        let artifacts = run_text(text);
        assert!(artifacts.summary["uncollapse"]["reference"]["kind"].is_null());
        assert!(artifacts.summary["uncollapse"]["max"].is_null());
        let table = artifacts.table.as_ref().unwrap();
        assert!(!table.headers.iter().any(|h| h.contains("uncollapse")));
        // Strong measurement from I/2: purity must rise toward 1.
        let last = table.rows.last().unwrap();
        assert!(last[3] > 0.9, "purity {last:?}");
    }

    #[test]
    fn write_outputs_produces_three_deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = parse_config(QND_CHECK).unwrap();
        let artifacts = run_experiment(&config).unwrap();
        write_outputs(&artifacts, &config, QND_CHECK, dir.path()).unwrap();

        let summary1 = std::fs::read(dir.path().join("summary.json")).unwrap();
        assert!(!dir.path().join("timeseries.csv").exists());
        let meta: Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("metadata.json")).unwrap())
                .unwrap();
        assert_eq!(
            meta["config_sha256"].as_str().unwrap(),
            hex::encode(Sha256::digest(QND_CHECK.as_bytes()))
        );
        assert!(meta["generated_at"].is_string());
        assert_eq!(meta["software"]["name"], "steadymon");
        // Timestamps live only in metadata: summary bytes are reproducible.
        let artifacts2 = run_experiment(&config).unwrap();
        write_outputs(&artifacts2, &config, QND_CHECK, dir.path()).unwrap();
        let summary2 = std::fs::read(dir.path().join("summary.json")).unwrap();
        assert_eq!(summary1, summary2);
        let text = String::from_utf8(summary1).unwrap();
        assert!(!text.contains("generated_at"));
    }

    #[test]
    fn timeseries_csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"
kind = "gamma-sweep"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 1.0

[sweep]
gamma_m_values = [0.0, 4.0]
"#;
        let config = parse_config(text).unwrap();
        let artifacts = run_experiment(&config).unwrap();
        write_outputs(&artifacts, &config, text, dir.path()).unwrap();
        let csv_text =
            std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
        let mut lines = csv_text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("gamma_m [1/time],drift [dimensionless]"));
        assert_eq!(lines.count(), 2);
    }
}
