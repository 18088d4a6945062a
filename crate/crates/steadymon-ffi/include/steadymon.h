#ifndef STEADYMON_H
#define STEADYMON_H

/* Generated by cbindgen from the steadymon-ffi crate. Do not edit by hand; rebuild the crate to refresh. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible `sm_*` call.
typedef enum {
  // Success.
  SM_STATUS_OK = 0,
  // A required pointer argument was null.
  SM_STATUS_NULL_POINTER = 1,
  // Input validation failed (range, dimension, name, buffer length).
  SM_STATUS_INVALID_ARGUMENT = 2,
  // The computation failed numerically (degenerate steady state,
  // trajectory blow-up, too many aborted ensemble members).
  SM_STATUS_NUMERICAL = 3,
  // An internal panic was caught at the boundary; state is
  // consistent but the result is unavailable.
  SM_STATUS_INTERNAL_PANIC = 4,
} SmStatus;

// Opaque ensemble statistics.
typedef struct SmEnsemble SmEnsemble;

// Opaque Lindblad model handle.
typedef struct SmModel SmModel;

// Opaque continuous-monitoring channel (operator, rate, efficiency).
typedef struct SmMonitor SmMonitor;

// Opaque sampled conditioned trajectory.
typedef struct SmTrajectory SmTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread (empty if none).
//
// The pointer stays valid until the next failing `sm_*` call on the
// same thread; copy the string if you need it longer.
const char *sm_last_error(void);

// Library version as a static NUL-terminated string.
const char *sm_version(void);

// Builds the thermal qubit (H = 0, relaxation γ↓, excitation γ↑).
//
// Fails with `INVALID_ARGUMENT` for negative/non-finite rates or
// γ↓ + γ↑ = 0.
SmStatus sm_model_thermal_qubit(double gamma_down, double gamma_up, SmModel **out);

// Hilbert-space dimension of the model (0 if `model` is null).
size_t sm_model_dim(const SmModel *model);

// Writes the steady state into `out` (row-major interleaved,
// `len` must equal `2*dim*dim`).
//
// Uses the closed form when the model carries one, otherwise solves the
// Liouvillian nullspace (failing with `NUMERICAL` if it is degenerate).
SmStatus sm_model_steady_state(const SmModel *model, double *out, size_t len);

// Releases a model handle (null is a no-op).
void sm_model_free(SmModel *model);

// Builds a monitor from a named single-qubit operator
// ("sigma_z", "z", "sigma_x", ...).
SmStatus sm_monitor_pauli(const char *name, double gamma_m, double eta, SmMonitor **out);

// Builds a monitor from an explicit `dim x dim` operator
// (row-major interleaved, `len` must equal `2*dim*dim`).
SmStatus sm_monitor_new(const double *c_matrix,
                        size_t len,
                        size_t dim,
                        double gamma_m,
                        double eta,
                        SmMonitor **out);

// Releases a monitor handle (null is a no-op).
void sm_monitor_free(SmMonitor *monitor);

// Writes the invariance residual ‖𝓓[c]ρ_ss‖_F to `out_residual`.
//
// The monitored steady state is invariant at every measurement rate iff
// this residual vanishes.
SmStatus sm_invariance_residual(const SmModel *model,
                                const SmMonitor *monitor,
                                double *out_residual);

// For each rate in `gammas[0..n]`, writes the Frobenius drift of the
// measured steady state from the unmonitored one into `out_drifts`.
//
// Per-rate failures (e.g. a degenerate measured generator) write NaN
// for that entry and do not fail the call; the reference solve failing
// returns `NUMERICAL`.
SmStatus sm_gamma_sweep_drift(const SmModel *model,
                              const SmMonitor *monitor,
                              const double *gammas,
                              size_t n,
                              double *out_drifts);

// Integrates one conditioned trajectory and returns a handle to its
// sampled path.
//
// `rho0` may be null to start in the model's steady state; otherwise it
// is a `2*dim*dim` row-major interleaved density matrix.
// `sample_stride >= 1` keeps every stride-th step (plus t = 0 and the
// final time).  Identical inputs give bitwise-identical paths.
SmStatus sm_trajectory_run(const SmModel *model,
                           const SmMonitor *monitor,
                           const double *rho0,
                           size_t rho0_len,
                           double dt,
                           double t_final,
                           uint64_t seed,
                           size_t sample_stride,
                           SmTrajectory **out);

// Number of sampled times (0 if `trajectory` is null).
size_t sm_trajectory_len(const SmTrajectory *trajectory);

// Writes the sampled times (`len` must equal `sm_trajectory_len`).
SmStatus sm_trajectory_times(const SmTrajectory *trajectory, double *out, size_t len);

// Writes the conditioned expectations ⟨(c + c†)/2⟩ at the sampled times
// (`len` must equal `sm_trajectory_len`).
SmStatus sm_trajectory_expectations(const SmTrajectory *trajectory, double *out, size_t len);

// Writes the sampled conditioned state at `index` (row-major
// interleaved; `len` must equal `2*dim*dim`).
SmStatus sm_trajectory_state(const SmTrajectory *trajectory, size_t index, double *out, size_t len);

// Number of measurement-record increments (one per integration step;
// 0 if `trajectory` is null).
size_t sm_trajectory_record_len(const SmTrajectory *trajectory);

// Writes the measurement-record increments dY (`len` must equal
// `sm_trajectory_record_len`).
SmStatus sm_trajectory_record(const SmTrajectory *trajectory, double *out, size_t len);

// Releases a trajectory handle (null is a no-op).
void sm_trajectory_free(SmTrajectory *trajectory);

// Runs `n_trajectories` independent conditioned trajectories
// (deterministically seeded from `base_seed`) and reduces them to
// ensemble statistics.
//
// `rho0` may be null to start in the model's steady state.  Results are
// bit-identical regardless of how many threads the runtime uses.
SmStatus sm_ensemble_run(const SmModel *model,
                         const SmMonitor *monitor,
                         const double *rho0,
                         size_t rho0_len,
                         double dt,
                         double t_final,
                         size_t sample_stride,
                         uint64_t base_seed,
                         size_t n_trajectories,
                         SmEnsemble **out);

// Number of sampled times (0 if `ensemble` is null).
size_t sm_ensemble_len(const SmEnsemble *ensemble);

// Number of aborted (and excluded) trajectories.
size_t sm_ensemble_n_aborted(const SmEnsemble *ensemble);

// Writes the sampled times (`len` must equal `sm_ensemble_len`).
SmStatus sm_ensemble_times(const SmEnsemble *ensemble, double *out, size_t len);

// Writes the mean conditioned purity E[Tr ρ_c²] at the sampled times
// (`len` must equal `sm_ensemble_len`).
SmStatus sm_ensemble_purity_mean(const SmEnsemble *ensemble, double *out, size_t len);

// Writes the ensemble-mean state at sampled `index` (row-major
// interleaved; `len` must equal `2*dim*dim`).
SmStatus sm_ensemble_mean_state(const SmEnsemble *ensemble, size_t index, double *out, size_t len);

// Releases an ensemble handle (null is a no-op).
void sm_ensemble_free(SmEnsemble *ensemble);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEADYMON_H */
