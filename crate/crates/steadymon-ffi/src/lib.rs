// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the steadymon library.
//!
//! Conventions:
//!
//! * Objects live behind opaque handles (`SmModel`, `SmMonitor`,
//!   `SmTrajectory`, `SmEnsemble`) created by `sm_*_run`/`sm_*_new`
//!   constructors and released by the matching `sm_*_free`; `free(NULL)`
//!   is a no-op.
//! * Every fallible call returns an [`SmStatus`]; on failure,
//!   [`sm_last_error`] returns a thread-local UTF-8 message that stays
//!   valid until the next failing call on the same thread.
//! * Complex matrices cross the boundary as row-major interleaved
//!   doubles: `buf[2*(i*dim + j)] = Re A_ij`,
//!   `buf[2*(i*dim + j) + 1] = Im A_ij`, total length `2*dim*dim`.
//!   Buffer lengths are always passed and checked exactly.
//! * Panics never unwind across the boundary; they surface as
//!   [`SmStatus::InternalPanic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use steadymon::ensemble::{run_ensemble, EnsembleConfig, EnsembleStats};
use steadymon::error::Error;
use steadymon::lindblad::{steady_state, LindbladModel};
use steadymon::models::{thermal_qubit, thermal_qubit_steady_state, QubitThermalParams};
use steadymon::monitor::{gamma_sweep, invariance_check, MonitoringSpec};
use steadymon::operator::{pauli_by_name, DensityMatrix, Operator};
use steadymon::trajectory::{simulate_trajectory, TrajectoryConfig, TrajectoryPath};

/// Status code returned by every fallible `sm_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Input validation failed (range, dimension, name, buffer length).
    InvalidArgument = 2,
    /// The computation failed numerically (degenerate steady state,
    /// trajectory blow-up, too many aborted ensemble members).
    Numerical = 3,
    /// An internal panic was caught at the boundary; state is
    /// consistent but the result is unavailable.
    InternalPanic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs removed");
    });
}

fn fail(status: SmStatus, message: &str) -> SmStatus {
    set_last_error(message);
    status
}

fn fail_null(name: &str) -> SmStatus {
    fail(SmStatus::NullPointer, &format!("null pointer: {name}"))
}

fn fail_error(e: &Error) -> SmStatus {
    let status = if e.exit_code() == 2 { SmStatus::Numerical } else { SmStatus::InvalidArgument };
    fail(status, &e.to_string())
}

fn fail_len(name: &str, got: usize, want: usize) -> SmStatus {
    fail(
        SmStatus::InvalidArgument,
        &format!("buffer '{name}' has length {got}, expected {want}"),
    )
}

fn guard(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(SmStatus::InternalPanic, "internal panic caught at the FFI boundary"),
    }
}

/// Message for the most recent failure on this thread (empty if none).
///
/// The pointer stays valid until the next failing `sm_*` call on the
/// same thread; copy the string if you need it longer.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// Opaque Lindblad model handle.
pub struct SmModel {
    model: LindbladModel,
    analytic_steady: Option<DensityMatrix>,
}

/// Builds the thermal qubit (H = 0, relaxation γ↓, excitation γ↑).
///
/// Fails with `INVALID_ARGUMENT` for negative/non-finite rates or
/// γ↓ + γ↑ = 0.
#[no_mangle]
pub unsafe extern "C" fn sm_model_thermal_qubit(
    gamma_down: f64,
    gamma_up: f64,
    out: *mut *mut SmModel,
) -> SmStatus {
    guard(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return fail_null("out");
        };
        match QubitThermalParams::new(gamma_down, gamma_up) {
            Ok(params) => {
                let handle = SmModel {
                    model: thermal_qubit(&params),
                    analytic_steady: Some(thermal_qubit_steady_state(&params)),
                };
                *out = Box::into_raw(Box::new(handle));
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Hilbert-space dimension of the model (0 if `model` is null).
#[no_mangle]
pub unsafe extern "C" fn sm_model_dim(model: *const SmModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.model.dim())
}

/// Writes the steady state into `out` (row-major interleaved,
/// `len` must equal `2*dim*dim`).
///
/// Uses the closed form when the model carries one, otherwise solves the
/// Liouvillian nullspace (failing with `NUMERICAL` if it is degenerate).
#[no_mangle]
pub unsafe extern "C" fn sm_model_steady_state(
    model: *const SmModel,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(handle) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        if out.is_null() {
            return fail_null("out");
        }
        let want = 2 * handle.model.dim() * handle.model.dim();
        if len != want {
            return fail_len("out", len, want);
        }
        let rho = match &handle.analytic_steady {
            Some(rho) => rho.clone(),
            None => match steady_state(&handle.model) {
                Ok(rho) => rho,
                Err(e) => return fail_error(&e),
            },
        };
        let data = rho.operator().to_interleaved_row_major();
        unsafe { std::slice::from_raw_parts_mut(out, len) }.copy_from_slice(&data);
        SmStatus::Ok
    })
}

/// Releases a model handle (null is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sm_model_free(model: *mut SmModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

// ---------------------------------------------------------------------------
// Monitors
// ---------------------------------------------------------------------------

/// Opaque continuous-monitoring channel (operator, rate, efficiency).
pub struct SmMonitor {
    spec: MonitoringSpec,
}

/// Builds a monitor from a named single-qubit operator
/// ("sigma_z", "z", "sigma_x", ...).
#[no_mangle]
pub unsafe extern "C" fn sm_monitor_pauli(
    name: *const c_char,
    gamma_m: f64,
    eta: f64,
    out: *mut *mut SmMonitor,
) -> SmStatus {
    guard(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return fail_null("out");
        };
        if name.is_null() {
            return fail_null("name");
        }
        let Ok(name) = (unsafe { CStr::from_ptr(name) }).to_str() else {
            return fail(SmStatus::InvalidArgument, "operator name is not valid UTF-8");
        };
        let c = match pauli_by_name(name) {
            Ok(op) => op,
            Err(e) => return fail_error(&e),
        };
        match MonitoringSpec::new(c, gamma_m, eta) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(SmMonitor { spec }));
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Builds a monitor from an explicit `dim x dim` operator
/// (row-major interleaved, `len` must equal `2*dim*dim`).
#[no_mangle]
pub unsafe extern "C" fn sm_monitor_new(
    c_matrix: *const f64,
    len: usize,
    dim: usize,
    gamma_m: f64,
    eta: f64,
    out: *mut *mut SmMonitor,
) -> SmStatus {
    guard(|| {
        let Some(out) = (unsafe { out.as_mut() }) else {
            return fail_null("out");
        };
        if c_matrix.is_null() {
            return fail_null("c_matrix");
        }
        let want = 2 * dim * dim;
        if len != want {
            return fail_len("c_matrix", len, want);
        }
        let data = unsafe { std::slice::from_raw_parts(c_matrix, len) };
        let c = match Operator::from_interleaved_row_major(dim, data) {
            Ok(op) => op,
            Err(e) => return fail_error(&e),
        };
        match MonitoringSpec::new(c, gamma_m, eta) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(SmMonitor { spec }));
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Releases a monitor handle (null is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sm_monitor_free(monitor: *mut SmMonitor) {
    if !monitor.is_null() {
        drop(unsafe { Box::from_raw(monitor) });
    }
}

// ---------------------------------------------------------------------------
// Invariance diagnostics
// ---------------------------------------------------------------------------

/// Writes the invariance residual ‖𝓓[c]ρ_ss‖_F to `out_residual`.
///
/// The monitored steady state is invariant at every measurement rate iff
/// this residual vanishes.
#[no_mangle]
pub unsafe extern "C" fn sm_invariance_residual(
    model: *const SmModel,
    monitor: *const SmMonitor,
    out_residual: *mut f64,
) -> SmStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        let Some(monitor) = (unsafe { monitor.as_ref() }) else {
            return fail_null("monitor");
        };
        let Some(out) = (unsafe { out_residual.as_mut() }) else {
            return fail_null("out_residual");
        };
        // Tolerance only affects the boolean verdict, which the C caller
        // derives themselves from the residual.
        match invariance_check(&model.model, monitor.spec.c(), 1e-10) {
            Ok(report) => {
                *out = report.residual_norm;
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// For each rate in `gammas[0..n]`, writes the Frobenius drift of the
/// measured steady state from the unmonitored one into `out_drifts`.
///
/// Per-rate failures (e.g. a degenerate measured generator) write NaN
/// for that entry and do not fail the call; the reference solve failing
/// returns `NUMERICAL`.
#[no_mangle]
pub unsafe extern "C" fn sm_gamma_sweep_drift(
    model: *const SmModel,
    monitor: *const SmMonitor,
    gammas: *const f64,
    n: usize,
    out_drifts: *mut f64,
) -> SmStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        let Some(monitor) = (unsafe { monitor.as_ref() }) else {
            return fail_null("monitor");
        };
        if gammas.is_null() {
            return fail_null("gammas");
        }
        if out_drifts.is_null() {
            return fail_null("out_drifts");
        }
        let gammas = unsafe { std::slice::from_raw_parts(gammas, n) };
        let out = unsafe { std::slice::from_raw_parts_mut(out_drifts, n) };
        match gamma_sweep(&model.model, monitor.spec.c(), gammas) {
            Ok(points) => {
                for (slot, point) in out.iter_mut().zip(&points) {
                    *slot = match &point.outcome {
                        Ok(outcome) => outcome.drift,
                        Err(_) => f64::NAN,
                    };
                }
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// Opaque sampled conditioned trajectory.
pub struct SmTrajectory {
    path: TrajectoryPath,
    dim: usize,
}

fn resolve_rho0(
    handle: &SmModel,
    rho0: *const f64,
    rho0_len: usize,
) -> Result<DensityMatrix, SmStatus> {
    if rho0.is_null() {
        return match &handle.analytic_steady {
            Some(rho) => Ok(rho.clone()),
            None => steady_state(&handle.model).map_err(|e| fail_error(&e)),
        };
    }
    let dim = handle.model.dim();
    let want = 2 * dim * dim;
    if rho0_len != want {
        return Err(fail_len("rho0", rho0_len, want));
    }
    let data = unsafe { std::slice::from_raw_parts(rho0, rho0_len) };
    let op = Operator::from_interleaved_row_major(dim, data).map_err(|e| fail_error(&e))?;
    DensityMatrix::new(op).map_err(|e| fail_error(&e))
}

/// Integrates one conditioned trajectory and returns a handle to its
/// sampled path.
///
/// `rho0` may be null to start in the model's steady state; otherwise it
/// is a `2*dim*dim` row-major interleaved density matrix.
/// `sample_stride >= 1` keeps every stride-th step (plus t = 0 and the
/// final time).  Identical inputs give bitwise-identical paths.
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_run(
    model: *const SmModel,
    monitor: *const SmMonitor,
    rho0: *const f64,
    rho0_len: usize,
    dt: f64,
    t_final: f64,
    seed: u64,
    sample_stride: usize,
    out: *mut *mut SmTrajectory,
) -> SmStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        let Some(monitor) = (unsafe { monitor.as_ref() }) else {
            return fail_null("monitor");
        };
        let Some(out) = (unsafe { out.as_mut() }) else {
            return fail_null("out");
        };
        let rho0 = match resolve_rho0(model, rho0, rho0_len) {
            Ok(rho) => rho,
            Err(status) => return status,
        };
        let config = match TrajectoryConfig::new(dt, t_final, seed)
            .and_then(|c| c.with_sample_stride(sample_stride))
        {
            Ok(c) => c,
            Err(e) => return fail_error(&e),
        };
        match simulate_trajectory(&rho0, &model.model, &monitor.spec, &config) {
            Ok(path) => {
                let dim = model.model.dim();
                *out = Box::into_raw(Box::new(SmTrajectory { path, dim }));
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Number of sampled times (0 if `trajectory` is null).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_len(trajectory: *const SmTrajectory) -> usize {
    unsafe { trajectory.as_ref() }.map_or(0, |t| t.path.times.len())
}

fn copy_out(name: &str, src: &[f64], dst: *mut f64, len: usize) -> SmStatus {
    if dst.is_null() {
        return fail_null(name);
    }
    if len != src.len() {
        return fail_len(name, len, src.len());
    }
    unsafe { std::slice::from_raw_parts_mut(dst, len) }.copy_from_slice(src);
    SmStatus::Ok
}

/// Writes the sampled times (`len` must equal `sm_trajectory_len`).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_times(
    trajectory: *const SmTrajectory,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(t) = (unsafe { trajectory.as_ref() }) else {
            return fail_null("trajectory");
        };
        copy_out("out", &t.path.times, out, len)
    })
}

/// Writes the conditioned expectations ⟨(c + c†)/2⟩ at the sampled times
/// (`len` must equal `sm_trajectory_len`).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_expectations(
    trajectory: *const SmTrajectory,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(t) = (unsafe { trajectory.as_ref() }) else {
            return fail_null("trajectory");
        };
        copy_out("out", &t.path.expectations, out, len)
    })
}

/// Writes the sampled conditioned state at `index` (row-major
/// interleaved; `len` must equal `2*dim*dim`).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_state(
    trajectory: *const SmTrajectory,
    index: usize,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(t) = (unsafe { trajectory.as_ref() }) else {
            return fail_null("trajectory");
        };
        let Some(state) = t.path.states.get(index) else {
            return fail(
                SmStatus::InvalidArgument,
                &format!("index {index} out of range (len {})", t.path.states.len()),
            );
        };
        debug_assert_eq!(state.dim(), t.dim);
        copy_out("out", &state.operator().to_interleaved_row_major(), out, len)
    })
}

/// Number of measurement-record increments (one per integration step;
/// 0 if `trajectory` is null).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_record_len(trajectory: *const SmTrajectory) -> usize {
    unsafe { trajectory.as_ref() }.map_or(0, |t| t.path.record.increments.len())
}

/// Writes the measurement-record increments dY (`len` must equal
/// `sm_trajectory_record_len`).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_record(
    trajectory: *const SmTrajectory,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(t) = (unsafe { trajectory.as_ref() }) else {
            return fail_null("trajectory");
        };
        copy_out("out", &t.path.record.increments, out, len)
    })
}

/// Releases a trajectory handle (null is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sm_trajectory_free(trajectory: *mut SmTrajectory) {
    if !trajectory.is_null() {
        drop(unsafe { Box::from_raw(trajectory) });
    }
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

/// Opaque ensemble statistics.
pub struct SmEnsemble {
    stats: EnsembleStats,
    dim: usize,
}

/// Runs `n_trajectories` independent conditioned trajectories
/// (deterministically seeded from `base_seed`) and reduces them to
/// ensemble statistics.
///
/// `rho0` may be null to start in the model's steady state.  Results are
/// bit-identical regardless of how many threads the runtime uses.
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_run(
    model: *const SmModel,
    monitor: *const SmMonitor,
    rho0: *const f64,
    rho0_len: usize,
    dt: f64,
    t_final: f64,
    sample_stride: usize,
    base_seed: u64,
    n_trajectories: usize,
    out: *mut *mut SmEnsemble,
) -> SmStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        let Some(monitor) = (unsafe { monitor.as_ref() }) else {
            return fail_null("monitor");
        };
        let Some(out) = (unsafe { out.as_mut() }) else {
            return fail_null("out");
        };
        let rho0 = match resolve_rho0(model, rho0, rho0_len) {
            Ok(rho) => rho,
            Err(status) => return status,
        };
        let config = match TrajectoryConfig::new(dt, t_final, 0)
            .and_then(|c| c.with_sample_stride(sample_stride))
            .and_then(|traj| EnsembleConfig::new(n_trajectories, base_seed, traj, Vec::new()))
        {
            Ok(c) => c,
            Err(e) => return fail_error(&e),
        };
        match run_ensemble(&rho0, &model.model, &monitor.spec, &config) {
            Ok(stats) => {
                let dim = model.model.dim();
                *out = Box::into_raw(Box::new(SmEnsemble { stats, dim }));
                SmStatus::Ok
            }
            Err(e) => fail_error(&e),
        }
    })
}

/// Number of sampled times (0 if `ensemble` is null).
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_len(ensemble: *const SmEnsemble) -> usize {
    unsafe { ensemble.as_ref() }.map_or(0, |e| e.stats.times.len())
}

/// Number of aborted (and excluded) trajectories.
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_n_aborted(ensemble: *const SmEnsemble) -> usize {
    unsafe { ensemble.as_ref() }.map_or(0, |e| e.stats.n_aborted)
}

/// Writes the sampled times (`len` must equal `sm_ensemble_len`).
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_times(
    ensemble: *const SmEnsemble,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(e) = (unsafe { ensemble.as_ref() }) else {
            return fail_null("ensemble");
        };
        copy_out("out", &e.stats.times, out, len)
    })
}

/// Writes the mean conditioned purity E[Tr ρ_c²] at the sampled times
/// (`len` must equal `sm_ensemble_len`).
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_purity_mean(
    ensemble: *const SmEnsemble,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(e) = (unsafe { ensemble.as_ref() }) else {
            return fail_null("ensemble");
        };
        copy_out("out", &e.stats.purity_mean, out, len)
    })
}

/// Writes the ensemble-mean state at sampled `index` (row-major
/// interleaved; `len` must equal `2*dim*dim`).
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_mean_state(
    ensemble: *const SmEnsemble,
    index: usize,
    out: *mut f64,
    len: usize,
) -> SmStatus {
    guard(|| {
        let Some(e) = (unsafe { ensemble.as_ref() }) else {
            return fail_null("ensemble");
        };
        let Some(state) = e.stats.mean_state.get(index) else {
            return fail(
                SmStatus::InvalidArgument,
                &format!("index {index} out of range (len {})", e.stats.mean_state.len()),
            );
        };
        debug_assert_eq!(state.dim(), e.dim);
        copy_out("out", &state.operator().to_interleaved_row_major(), out, len)
    })
}

/// Releases an ensemble handle (null is a no-op).
#[no_mangle]
pub unsafe extern "C" fn sm_ensemble_free(ensemble: *mut SmEnsemble) {
    if !ensemble.is_null() {
        drop(unsafe { Box::from_raw(ensemble) });
    }
}
