// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: TOML schema, parsing, and validation.
//!
//! The file format is a single TOML document.  Complex numbers are
//! `[re, im]` pairs and matrices are nested row lists, so a σ_x monitor
//! reads
//!
//! ```toml
//! [monitoring]
//! operator = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
//! gamma_m = 4.0
//! eta = 1.0
//! ```
//!
//! (named operators like `"sigma_x"` are accepted wherever a matrix is).
//! Validation collects *every* problem into one
//! [`Error::ConfigValidation`] rather than stopping at the first, with
//! each message prefixed by the offending field path.
//!
//! The core numerical types deliberately carry no serde support; this
//! module owns all conversions between file syntax and library types.

use serde::Deserialize;

use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::models::{
    build_preset, thermal_qubit_with_detuning, Preset, QubitThermalParams,
};
use crate::monitor::{MonitoringSpec, DEFAULT_INVARIANCE_TOL};
use crate::operator::{pauli_by_name, C64, DensityMatrix, Operator};
use crate::trajectory::TrajectoryConfig;

/// Nested-row matrix form used in config files: `rows[i][j] = [re, im]`.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// Serializes an operator back into the config-file matrix form.
///
/// This is the inverse of the parser's matrix reader and is also used to
/// embed computed states in `summary.json`, so file and summary share
/// one convention.
pub fn operator_to_rows(op: &Operator) -> MatrixRows {
    (0..op.dim())
        .map(|i| {
            (0..op.dim())
                .map(|j| {
                    let z = op.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

fn operator_from_rows(path: &str, rows: &MatrixRows, errors: &mut Vec<String>) -> Option<Operator> {
    let dim = rows.len();
    if dim == 0 {
        errors.push(format!("{path}: matrix has no rows"));
        return None;
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            errors.push(format!(
                "{path}: row {i} has {} columns, expected {dim} (matrix must be square)",
                row.len()
            ));
            return None;
        }
    }
    let complex_rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    match Operator::from_rows(&complex_rows) {
        Ok(op) => Some(op),
        Err(e) => {
            errors.push(format!("{path}: {e}"));
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Raw (serde) layer: structure mirrors the file, no semantic checks.
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    model: Option<RawModel>,
    monitoring: Option<RawMonitoring>,
    trajectory: Option<RawTrajectory>,
    ensemble: Option<RawEnsemble>,
    sweep: Option<RawSweep>,
    invariance: Option<RawInvariance>,
    assertions: Option<RawAssertions>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    preset: Option<String>,
    gamma_down: Option<f64>,
    gamma_up: Option<f64>,
    detuning: Option<f64>,
    hamiltonian: Option<MatrixRows>,
    jumps: Option<Vec<MatrixRows>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonitoring {
    operator: RawOperator,
    gamma_m: f64,
    eta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawOperator {
    Name(String),
    Matrix(MatrixRows),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrajectory {
    dt: f64,
    t_final: f64,
    seed: Option<u64>,
    sample_stride: Option<usize>,
    renormalize: Option<bool>,
    initial_state: Option<RawInitialState>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawInitialState {
    Name(String),
    Matrix(MatrixRows),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    n_trajectories: usize,
    base_seed: Option<u64>,
    observables: Option<Vec<RawObservable>>,
    localization_observable: Option<String>,
    localization_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawObservable {
    Name(String),
    Custom { name: String, matrix: MatrixRows },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    gamma_m_values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInvariance {
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAssertions {
    require_invariant: Option<bool>,
    max_residual: Option<f64>,
    max_drift: Option<f64>,
    max_uncollapse: Option<f64>,
    min_final_purity: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    write_timeseries: Option<bool>,
}

// ---------------------------------------------------------------------------
// Validated layer.
// ---------------------------------------------------------------------------

/// The four experiment kinds the CLI runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    InvarianceCheck,
    GammaSweep,
    Trajectory,
    Ensemble,
}

impl ExperimentKind {
    /// The config-file / subcommand spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::InvarianceCheck => "invariance-check",
            ExperimentKind::GammaSweep => "gamma-sweep",
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::Ensemble => "ensemble",
        }
    }

    /// Parses the config-file spelling.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "invariance-check" => Some(ExperimentKind::InvarianceCheck),
            "gamma-sweep" => Some(ExperimentKind::GammaSweep),
            "trajectory" => Some(ExperimentKind::Trajectory),
            "ensemble" => Some(ExperimentKind::Ensemble),
            _ => None,
        }
    }
}

/// Initial conditioned state for trajectory/ensemble runs.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Steady state of the *unmonitored* model (the steady-ensemble start).
    Steady,
    /// I/d.
    MaximallyMixed,
    /// |0⟩⟨0|.
    Ground,
    /// |d−1⟩⟨d−1| (|1⟩⟨1| for qubits).
    Excited,
    /// A fully specified density matrix.
    Explicit(DensityMatrix),
}

/// The model plus whatever closed-form knowledge the preset carries.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    /// The Lindblad model to run.
    pub model: LindbladModel,
    /// Closed-form steady state, available when built from a preset.
    pub analytic_steady_state: Option<DensityMatrix>,
    /// Preset name, when built from one (for the summary echo).
    pub preset: Option<String>,
}

/// Optional post-run bounds; any violation exits with code 3.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assertions {
    /// Require the invariance verdict to equal this value.
    pub require_invariant: Option<bool>,
    /// Upper bound on the invariance residual ‖𝓓[c]ρ_ss‖_F.
    pub max_residual: Option<f64>,
    /// Upper bound on every sweep point's steady-state drift.
    pub max_drift: Option<f64>,
    /// Upper bound on the uncollapse metric at every sampled time.
    pub max_uncollapse: Option<f64>,
    /// Lower bound on the final mean conditioned purity.
    pub min_final_purity: Option<f64>,
}

impl Assertions {
    /// True when no bound is configured.
    pub fn is_empty(&self) -> bool {
        *self == Assertions::default()
    }
}

/// Output location and switches.
#[derive(Debug, Clone)]
pub struct OutputSpec {
    /// Target directory; the CLI `--output` flag overrides it.
    pub directory: Option<std::path::PathBuf>,
    /// Whether to write `timeseries.csv` (default true).
    pub write_timeseries: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { directory: None, write_timeseries: true }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub kind: ExperimentKind,
    /// The model section.
    pub model: ModelSpec,
    /// Monitoring channel (required by every kind).
    pub monitoring: MonitoringSpec,
    /// Integration grid; present for trajectory/ensemble kinds.
    pub trajectory: Option<TrajectoryConfig>,
    /// Initial conditioned state (default [`InitialState::Steady`]).
    pub initial_state: InitialState,
    /// Ensemble settings; present for the ensemble kind.
    pub ensemble: Option<EnsembleConfig>,
    /// |⟨A⟩| threshold for the localized-fraction diagnostic.
    pub localization_threshold: f64,
    /// Γ_m grid; present for the gamma-sweep kind.
    pub sweep_gammas: Option<Vec<f64>>,
    /// Invariance verdict tolerance.
    pub invariance_tolerance: f64,
    /// Configured post-run bounds.
    pub assertions: Assertions,
    /// Output location and switches.
    pub output: OutputSpec,
    /// The parsed input document, echoed verbatim into `summary.json`.
    pub echo: toml::Value,
}

/// Parses and validates a TOML experiment config.
///
/// Syntax errors (including unknown keys) fail immediately with
/// [`Error::ConfigParse`] carrying the TOML position; semantic problems
/// are all collected into one [`Error::ConfigValidation`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::ConfigParse { message: e.to_string() })?;
    let echo: toml::Value =
        toml::from_str(text).map_err(|e| Error::ConfigParse { message: e.to_string() })?;

    let mut errors: Vec<String> = Vec::new();

    let kind = ExperimentKind::parse(&raw.kind);
    if kind.is_none() {
        errors.push(format!(
            "kind = \"{}\" is not one of invariance-check, gamma-sweep, trajectory, ensemble",
            raw.kind
        ));
    }

    let model_spec = match &raw.model {
        None => {
            errors.push("model: section required".to_owned());
            None
        }
        Some(m) => validate_model(m, &mut errors),
    };

    let monitoring = match &raw.monitoring {
        None => {
            errors.push("monitoring: section required".to_owned());
            None
        }
        Some(m) => validate_monitoring(m, model_spec.as_ref(), &mut errors),
    };

    // Kind-specific section requirements.
    let needs_trajectory = matches!(
        kind,
        Some(ExperimentKind::Trajectory) | Some(ExperimentKind::Ensemble)
    );
    if needs_trajectory && raw.trajectory.is_none() {
        errors.push(format!(
            "trajectory: section required for kind = \"{}\"",
            raw.kind
        ));
    }
    if kind == Some(ExperimentKind::Ensemble) && raw.ensemble.is_none() {
        errors.push("ensemble: section required for kind = \"ensemble\"".to_owned());
    }
    if kind == Some(ExperimentKind::GammaSweep) && raw.sweep.is_none() {
        errors.push("sweep: section required for kind = \"gamma-sweep\"".to_owned());
    }

    let (trajectory, initial_state) = match &raw.trajectory {
        None => (None, InitialState::Steady),
        Some(t) => validate_trajectory(t, model_spec.as_ref(), &mut errors),
    };

    let (ensemble, localization_threshold) = match &raw.ensemble {
        None => (None, 0.9),
        Some(e) => validate_ensemble(e, trajectory.as_ref(), model_spec.as_ref(), &mut errors),
    };

    let sweep_gammas = match &raw.sweep {
        None => None,
        Some(s) => {
            for (i, &g) in s.gamma_m_values.iter().enumerate() {
                if !(g >= 0.0) || !g.is_finite() {
                    errors.push(format!(
                        "sweep.gamma_m_values[{i}] = {g} out of range [0, inf)"
                    ));
                }
            }
            if s.gamma_m_values.is_empty() {
                errors.push("sweep.gamma_m_values: must not be empty".to_owned());
            }
            Some(s.gamma_m_values.clone())
        }
    };

    let invariance_tolerance = match &raw.invariance {
        None => DEFAULT_INVARIANCE_TOL,
        Some(inv) => match inv.tolerance {
            None => DEFAULT_INVARIANCE_TOL,
            Some(tol) if tol > 0.0 && tol.is_finite() => tol,
            Some(tol) => {
                errors.push(format!("invariance.tolerance = {tol} out of range (0, inf)"));
                DEFAULT_INVARIANCE_TOL
            }
        },
    };

    let assertions = validate_assertions(
        raw.assertions.as_ref().unwrap_or(&RawAssertions::default()),
        kind,
        &mut errors,
    );

    let output = match &raw.output {
        None => OutputSpec::default(),
        Some(o) => OutputSpec {
            directory: o.directory.as_ref().map(std::path::PathBuf::from),
            write_timeseries: o.write_timeseries.unwrap_or(true),
        },
    };

    if !errors.is_empty() {
        return Err(Error::ConfigValidation { errors });
    }
    Ok(ExperimentConfig {
        kind: kind.expect("errors empty implies kind parsed"),
        model: model_spec.expect("errors empty implies model built"),
        monitoring: monitoring.expect("errors empty implies monitoring built"),
        trajectory,
        initial_state,
        ensemble,
        localization_threshold,
        sweep_gammas,
        invariance_tolerance,
        assertions,
        output,
        echo,
    })
}

fn validate_model(m: &RawModel, errors: &mut Vec<String>) -> Option<ModelSpec> {
    let explicit = m.hamiltonian.is_some() || m.jumps.is_some();
    if m.preset.is_some() && explicit {
        errors.push(
            "model: give either a preset with rates or explicit matrices, not both".to_owned(),
        );
        return None;
    }
    if let Some(name) = &m.preset {
        let (Some(gd), Some(gu)) = (m.gamma_down, m.gamma_up) else {
            errors.push(
                "model.gamma_down and model.gamma_up: required with model.preset".to_owned(),
            );
            return None;
        };
        let params = match QubitThermalParams::new(gd, gu) {
            Ok(p) => p,
            Err(e) => {
                errors.push(format!("model.{e}"));
                return None;
            }
        };
        let Preset { model, steady_state, .. } = match build_preset(name, &params) {
            Ok(p) => p,
            Err(e) => {
                errors.push(format!("model.preset: {e}"));
                return None;
            }
        };
        let model = match m.detuning {
            None => model,
            Some(eps) if eps.is_finite() => thermal_qubit_with_detuning(&params, eps),
            Some(eps) => {
                errors.push(format!("model.detuning = {eps} must be finite"));
                return None;
            }
        };
        // A σ_z detuning commutes with the diagonal steady state, so the
        // closed form survives it.
        Some(ModelSpec {
            model,
            analytic_steady_state: Some(steady_state),
            preset: Some(name.clone()),
        })
    } else if explicit {
        if m.gamma_down.is_some() || m.gamma_up.is_some() || m.detuning.is_some() {
            errors.push(
                "model.gamma_down/gamma_up/detuning: only meaningful with model.preset"
                    .to_owned(),
            );
        }
        let Some(h_rows) = &m.hamiltonian else {
            errors.push("model.hamiltonian: required for an explicit model".to_owned());
            return None;
        };
        let hamiltonian = operator_from_rows("model.hamiltonian", h_rows, errors)?;
        let mut jumps = Vec::new();
        for (k, rows) in m.jumps.as_deref().unwrap_or(&[]).iter().enumerate() {
            let path = format!("model.jumps[{k}]");
            let jump = operator_from_rows(&path, rows, errors)?;
            if jump.dim() != hamiltonian.dim() {
                errors.push(format!(
                    "{path}: dimension {} does not match hamiltonian dimension {}",
                    jump.dim(),
                    hamiltonian.dim()
                ));
                return None;
            }
            jumps.push(jump);
        }
        match LindbladModel::new(hamiltonian, jumps) {
            Ok(model) => Some(ModelSpec { model, analytic_steady_state: None, preset: None }),
            Err(e) => {
                errors.push(format!("model: {e}"));
                None
            }
        }
    } else {
        errors.push(
            "model: give a preset (preset/gamma_down/gamma_up) or explicit matrices \
             (hamiltonian/jumps)"
                .to_owned(),
        );
        None
    }
}

fn validate_monitoring(
    m: &RawMonitoring,
    model: Option<&ModelSpec>,
    errors: &mut Vec<String>,
) -> Option<MonitoringSpec> {
    let c = match &m.operator {
        RawOperator::Name(name) => match pauli_by_name(name) {
            Ok(op) => Some(op),
            Err(e) => {
                errors.push(format!("monitoring.operator: {e}"));
                None
            }
        },
        RawOperator::Matrix(rows) => operator_from_rows("monitoring.operator", rows, errors),
    }?;
    if let Some(spec) = model {
        if c.dim() != spec.model.dim() {
            errors.push(format!(
                "monitoring.operator: dimension {} does not match model dimension {}",
                c.dim(),
                spec.model.dim()
            ));
            return None;
        }
    }
    match MonitoringSpec::new(c, m.gamma_m, m.eta.unwrap_or(1.0)) {
        Ok(spec) => Some(spec),
        Err(e) => {
            errors.push(format!("monitoring.{e}"));
            None
        }
    }
}

fn validate_trajectory(
    t: &RawTrajectory,
    model: Option<&ModelSpec>,
    errors: &mut Vec<String>,
) -> (Option<TrajectoryConfig>, InitialState) {
    let initial_state = match &t.initial_state {
        None => InitialState::Steady,
        Some(RawInitialState::Name(name)) => match name.as_str() {
            "steady" => InitialState::Steady,
            "maximally-mixed" => InitialState::MaximallyMixed,
            "ground" => InitialState::Ground,
            "excited" => InitialState::Excited,
            other => {
                errors.push(format!(
                    "trajectory.initial_state = \"{other}\" is not one of steady, \
                     maximally-mixed, ground, excited (or an explicit matrix)"
                ));
                InitialState::Steady
            }
        },
        Some(RawInitialState::Matrix(rows)) => {
            match operator_from_rows("trajectory.initial_state", rows, errors) {
                None => InitialState::Steady,
                Some(op) => {
                    if let Some(spec) = model {
                        if op.dim() != spec.model.dim() {
                            errors.push(format!(
                                "trajectory.initial_state: dimension {} does not match model \
                                 dimension {}",
                                op.dim(),
                                spec.model.dim()
                            ));
                            return (None, InitialState::Steady);
                        }
                    }
                    match DensityMatrix::new(op) {
                        Ok(rho) => InitialState::Explicit(rho),
                        Err(e) => {
                            errors.push(format!("trajectory.initial_state: {e}"));
                            InitialState::Steady
                        }
                    }
                }
            }
        }
    };

    let mut config = match TrajectoryConfig::new(t.dt, t.t_final, t.seed.unwrap_or(0)) {
        Ok(c) => c,
        Err(e) => {
            errors.push(format!("trajectory.{e}"));
            return (None, initial_state);
        }
    };
    if let Some(stride) = t.sample_stride {
        config = match config.with_sample_stride(stride) {
            Ok(c) => c,
            Err(e) => {
                errors.push(format!("trajectory.{e}"));
                return (None, initial_state);
            }
        };
    }
    if let Some(renorm) = t.renormalize {
        config = config.with_renormalize(renorm);
    }
    (Some(config), initial_state)
}

fn validate_ensemble(
    e: &RawEnsemble,
    trajectory: Option<&TrajectoryConfig>,
    model: Option<&ModelSpec>,
    errors: &mut Vec<String>,
) -> (Option<EnsembleConfig>, f64) {
    let threshold = match e.localization_threshold {
        None => 0.9,
        Some(th) if th > 0.0 && th.is_finite() => th,
        Some(th) => {
            errors.push(format!(
                "ensemble.localization_threshold = {th} out of range (0, inf)"
            ));
            0.9
        }
    };

    let mut observables: Vec<(String, Operator)> = Vec::new();
    let mut obs_ok = true;
    for (i, raw_obs) in e.observables.as_deref().unwrap_or(&[]).iter().enumerate() {
        let parsed = match raw_obs {
            RawObservable::Name(name) => match pauli_by_name(name) {
                Ok(op) => Some((name.clone(), op)),
                Err(err) => {
                    errors.push(format!("ensemble.observables[{i}]: {err}"));
                    None
                }
            },
            RawObservable::Custom { name, matrix } => {
                operator_from_rows(&format!("ensemble.observables[{i}].matrix"), matrix, errors)
                    .map(|op| (name.clone(), op))
            }
        };
        match parsed {
            Some((name, op)) => {
                if let Some(spec) = model {
                    if op.dim() != spec.model.dim() {
                        errors.push(format!(
                            "ensemble.observables[{i}]: dimension {} does not match model \
                             dimension {}",
                            op.dim(),
                            spec.model.dim()
                        ));
                        obs_ok = false;
                        continue;
                    }
                }
                observables.push((name, op));
            }
            None => obs_ok = false,
        }
    }

    let Some(traj) = trajectory else {
        // Missing/invalid trajectory section already reported.
        return (None, threshold);
    };
    if !obs_ok {
        return (None, threshold);
    }

    let config = match EnsembleConfig::new(
        e.n_trajectories,
        e.base_seed.unwrap_or(0),
        traj.clone(),
        observables,
    ) {
        Ok(c) => c,
        Err(Error::ConfigValidation { errors: inner }) => {
            errors.extend(inner.into_iter().map(|msg| format!("ensemble.observables: {msg}")));
            return (None, threshold);
        }
        Err(err) => {
            errors.push(format!("ensemble.{err}"));
            return (None, threshold);
        }
    };
    let config = match &e.localization_observable {
        None => config,
        Some(name) => match config.with_localization_observable(name) {
            Ok(c) => c,
            Err(err) => {
                errors.push(format!("ensemble.localization_observable: {err}"));
                return (None, threshold);
            }
        },
    };
    (Some(config), threshold)
}

fn validate_assertions(
    a: &RawAssertions,
    kind: Option<ExperimentKind>,
    errors: &mut Vec<String>,
) -> Assertions {
    let mut check_kind = |field: &str, allowed: ExperimentKind, present: bool| {
        if present {
            if let Some(k) = kind {
                if k != allowed {
                    errors.push(format!(
                        "assertions.{field}: only meaningful for kind = \"{}\"",
                        allowed.as_str()
                    ));
                }
            }
        }
    };
    check_kind(
        "require_invariant",
        ExperimentKind::InvarianceCheck,
        a.require_invariant.is_some(),
    );
    check_kind("max_residual", ExperimentKind::InvarianceCheck, a.max_residual.is_some());
    check_kind("max_drift", ExperimentKind::GammaSweep, a.max_drift.is_some());
    check_kind("max_uncollapse", ExperimentKind::Ensemble, a.max_uncollapse.is_some());
    check_kind("min_final_purity", ExperimentKind::Ensemble, a.min_final_purity.is_some());

    for (field, value) in [
        ("max_residual", a.max_residual),
        ("max_drift", a.max_drift),
        ("max_uncollapse", a.max_uncollapse),
    ] {
        if let Some(v) = value {
            if !(v >= 0.0) || !v.is_finite() {
                errors.push(format!("assertions.{field} = {v} out of range [0, inf)"));
            }
        }
    }
    if let Some(v) = a.min_final_purity {
        if !(0.0..=1.0).contains(&v) {
            errors.push(format!("assertions.min_final_purity = {v} out of range [0, 1]"));
        }
    }

    Assertions {
        require_invariant: a.require_invariant,
        max_residual: a.max_residual,
        max_drift: a.max_drift,
        max_uncollapse: a.max_uncollapse,
        min_final_purity: a.min_final_purity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli, Pauli};

    const MINIMAL_INVARIANCE: &str = r#"
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
    fn minimal_invariance_check_config_is_valid() {
        let config = parse_config(MINIMAL_INVARIANCE).unwrap();
        assert_eq!(config.kind, ExperimentKind::InvarianceCheck);
        assert_eq!(config.model.preset.as_deref(), Some("thermal_qubit"));
        assert_eq!(config.monitoring.c().matrix(), pauli(Pauli::Z).matrix());
        assert_eq!(config.monitoring.gamma_m(), 4.0);
        assert_eq!(config.invariance_tolerance, DEFAULT_INVARIANCE_TOL);
        let ss = config.model.analytic_steady_state.unwrap();
        assert_eq!(ss.operator().get(1, 1).re, 0.25);
        assert!(config.assertions.is_empty());
        assert!(config.output.write_timeseries);
    }

    #[test]
    fn eta_out_of_range_names_field_and_bound() {
        let text = MINIMAL_INVARIANCE.replace("eta = 1.0", "eta = 1.5");
        let err = parse_config(&text).unwrap_err();
        let Error::ConfigValidation { errors } = err else {
            panic!("expected ConfigValidation, got {err:?}");
        };
        assert_eq!(errors.len(), 1);
        assert!(errors[0].contains("monitoring.eta"), "{errors:?}");
        assert!(errors[0].contains("1.5"), "{errors:?}");
        assert!(errors[0].contains("[0, 1]"), "{errors:?}");
    }

    #[test]
    fn all_validation_errors_are_collected_not_just_the_first() {
        let text = r#"
kind = "no-such-kind"

[model]
preset = "thermal_qubit"
gamma_down = -3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_q"
gamma_m = -2.0
"#;
        let err = parse_config(text).unwrap_err();
        let Error::ConfigValidation { errors } = err else {
            panic!("expected ConfigValidation, got {err:?}");
        };
        assert!(errors.len() >= 3, "want kind + model + monitoring errors, got {errors:#?}");
        assert!(errors.iter().any(|e| e.contains("kind")));
        assert!(errors.iter().any(|e| e.contains("gamma_down")));
        assert!(errors.iter().any(|e| e.contains("monitoring.operator")));
    }

    #[test]
    fn syntax_and_unknown_keys_are_parse_errors_with_position() {
        let err = parse_config("kind = ").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { .. }));

        let err = parse_config(&format!("{MINIMAL_INVARIANCE}\n[model2]\nx = 1\n")).unwrap_err();
        let Error::ConfigParse { message } = err else {
            panic!("expected ConfigParse, got {err:?}");
        };
        assert!(message.contains("model2"), "{message}");
    }

    #[test]
    fn explicit_matrix_round_trips_through_parse_and_reserialize() {
        // The serializer is the oracle: parse an explicit complex matrix for
        // c, re-serialize it, and require the exact nested-row structure back.
        let rows: MatrixRows = vec![
            vec![[0.0, 0.0], [0.25, -0.5]],
            vec![[0.25, 0.5], [1.0, 0.0]],
        ];
        let text = r#"
kind = "invariance-check"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = [[[0.0, 0.0], [0.25, -0.5]], [[0.25, 0.5], [1.0, 0.0]]]
gamma_m = 4.0
eta = 0.5
"#;
        let config = parse_config(text).unwrap();
        assert_eq!(operator_to_rows(config.monitoring.c()), rows);
    }

    #[test]
    fn explicit_model_matrices_build_a_lindblad_model() {
        let text = r#"
kind = "invariance-check"

[model]
hamiltonian = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
jumps = [
    [[[0.0, 0.0], [1.7320508075688772, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    [[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
]

[monitoring]
operator = "sigma_z"
gamma_m = 4.0
"#;
        let config = parse_config(text).unwrap();
        assert_eq!(config.model.model.jumps().len(), 2);
        assert!(config.model.analytic_steady_state.is_none());
        assert_eq!(config.monitoring.eta(), 1.0);
    }

    #[test]
    fn non_hermitian_explicit_hamiltonian_is_reported_with_path() {
        let text = r#"
kind = "invariance-check"

[model]
hamiltonian = [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]

[monitoring]
operator = "sigma_z"
gamma_m = 1.0
"#;
        let Error::ConfigValidation { errors } = parse_config(text).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(errors.iter().any(|e| e.starts_with("model:") && e.contains("Hermitian")));
    }

    #[test]
    fn trajectory_kind_requires_trajectory_section() {
        let text = MINIMAL_INVARIANCE.replace("invariance-check", "trajectory");
        let Error::ConfigValidation { errors } = parse_config(&text).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(errors.iter().any(|e| e.contains("trajectory: section required")));
    }

    #[test]
    fn full_ensemble_config_parses() {
        let text = r#"
kind = "ensemble"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 40.0
eta = 1.0

[trajectory]
dt = 2.5e-5
t_final = 2.5
seed = 0
sample_stride = 500
initial_state = "steady"

[ensemble]
n_trajectories = 1000
base_seed = 42
observables = ["sigma_z", { name = "proj_excited", matrix = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]] }]
localization_observable = "sigma_z"
localization_threshold = 0.9

[assertions]
max_uncollapse = 0.17889
min_final_purity = 0.725

[output]
directory = "runs/uncollapse"
write_timeseries = true
"#;
        let config = parse_config(text).unwrap();
        let ens = config.ensemble.as_ref().unwrap();
        assert_eq!(ens.n_trajectories(), 1000);
        assert_eq!(ens.base_seed(), 42);
        assert_eq!(ens.observables().len(), 2);
        assert_eq!(ens.observables()[1].0, "proj_excited");
        assert_eq!(ens.localization_observable(), Some("sigma_z"));
        assert_eq!(config.localization_threshold, 0.9);
        assert_eq!(config.initial_state, InitialState::Steady);
        assert_eq!(config.assertions.max_uncollapse, Some(0.17889));
        assert_eq!(
            config.output.directory.as_deref(),
            Some(std::path::Path::new("runs/uncollapse"))
        );
    }

    #[test]
    fn ensemble_duplicate_observables_are_collected() {
        let text = r#"
kind = "ensemble"

[model]
preset = "thermal_qubit"
gamma_down = 3.0
gamma_up = 1.0

[monitoring]
operator = "sigma_z"
gamma_m = 1.0

[trajectory]
dt = 0.001
t_final = 1.0

[ensemble]
n_trajectories = 10
observables = ["sigma_z", "sigma_z"]
"#;
        let Error::ConfigValidation { errors } = parse_config(text).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(
            errors.iter().any(|e| e.contains("ensemble.observables") && e.contains("duplicate")),
            "{errors:#?}"
        );
    }

    #[test]
    fn assertions_must_match_the_kind() {
        let text = format!("{MINIMAL_INVARIANCE}\n[assertions]\nmax_drift = 1e-10\n");
        let Error::ConfigValidation { errors } = parse_config(&text).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(
            errors.iter().any(|e| e.contains("assertions.max_drift")
                && e.contains("gamma-sweep")),
            "{errors:#?}"
        );
    }

    #[test]
    fn sweep_kind_requires_gamma_values_and_validates_them() {
        let base = MINIMAL_INVARIANCE.replace("invariance-check", "gamma-sweep");
        let Error::ConfigValidation { errors } = parse_config(&base).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(errors.iter().any(|e| e.contains("sweep: section required")));

        let text = format!("{base}\n[sweep]\ngamma_m_values = [0.0, -1.0]\n");
        let Error::ConfigValidation { errors } = parse_config(&text).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(errors.iter().any(|e| e.contains("gamma_m_values[1]")), "{errors:#?}");
    }

    #[test]
    fn explicit_initial_state_is_validated_as_a_density_matrix() {
        let base = MINIMAL_INVARIANCE.replace("invariance-check", "trajectory");
        let good = format!(
            "{base}\n[trajectory]\ndt = 0.001\nt_final = 1.0\ninitial_state = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]\n"
        );
        let config = parse_config(&good).unwrap();
        assert!(matches!(config.initial_state, InitialState::Explicit(_)));

        let bad = format!(
            "{base}\n[trajectory]\ndt = 0.001\nt_final = 1.0\ninitial_state = [[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]\n"
        );
        let Error::ConfigValidation { errors } = parse_config(&bad).unwrap_err() else {
            panic!("expected validation failure");
        };
        assert!(errors.iter().any(|e| e.contains("trajectory.initial_state")), "{errors:#?}");
    }

    #[test]
    fn operator_serializer_inverts_the_parser_on_paulis() {
        for which in [Pauli::X, Pauli::Y, Pauli::Z, Pauli::Plus, Pauli::Minus, Pauli::Id] {
            let op = pauli(which);
            let rows = operator_to_rows(&op);
            let mut errors = Vec::new();
            let back = operator_from_rows("roundtrip", &rows, &mut errors).unwrap();
            assert!(errors.is_empty());
            assert_eq!(back.matrix(), op.matrix());
        }
    }
}
