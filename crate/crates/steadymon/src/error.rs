// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error types shared across the library.
//!
//! Numerical physics failures (degenerate steady states, blown-up
//! trajectories, non-physical kernels) get dedicated variants so callers can
//! distinguish "your model is outside the method's assumptions" from plain
//! input validation.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Unified library error.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two operators (or an operator and a state) have incompatible shapes.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A vector length does not correspond to a square matrix.
    #[error("length mismatch: vector of length {len} is not d*d for dimension {dim}")]
    LengthMismatch { len: usize, dim: usize },

    /// Matrix entries do not form a square matrix.
    #[error("operator entries are not square: {rows} rows but row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },

    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    /// A density matrix does not have unit trace.
    #[error("state trace {trace:.12} deviates from 1 beyond tolerance {tol:.3e}")]
    NonUnitTrace { trace: f64, tol: f64 },

    /// A density matrix has a negative eigenvalue beyond tolerance.
    #[error("state is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} < -{tol:.3e}")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    /// The Liouvillian kernel is not one-dimensional; the steady state is
    /// not unique and the solver refuses to pick a kernel element.
    #[error("degenerate steady state: Liouvillian kernel has dimension {kernel_dim}, expected 1")]
    DegenerateSteadyState { kernel_dim: usize },

    /// The kernel vector cannot be normalized into a density matrix.
    #[error("non-physical kernel: hermitized kernel vector has |trace| = {trace_magnitude:.3e}")]
    NonPhysicalKernel { trace_magnitude: f64 },

    /// A thermal qubit needs at least one nonzero rate.
    #[error("all rates zero: gamma_down + gamma_up must be positive")]
    AllRatesZero,

    /// A scalar parameter is outside its allowed range.
    #[error("{field} = {value} out of range [{min}, {max}]")]
    RangeError {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The σ_x counterexample is vacuous at γ↑ = γ↓ (diag(½,½) is invariant
    /// under σ_x conjugation, so nothing is contradicted).
    #[error("degenerate choice: gamma_up = gamma_down makes the sigma_x fixture invariant (p = 1/2)")]
    DegenerateChoice,

    /// Invalid integrator step size.
    #[error("invalid step size dt = {dt}; dt must be positive and finite")]
    StepSizeInvalid { dt: f64 },

    /// A stochastic trajectory left the physical region entirely
    /// (Frobenius norm exploded); almost always a too-large dt.
    #[error("state blow-up at step {step}: ||rho||_F = {norm:.3e} (dt too large for this model?)")]
    StateBlowup { step: usize, norm: f64 },

    /// A sampled trajectory state failed its density-matrix checks.
    #[error("trajectory state invalid at step {step} (t = {time:.6}): {source}")]
    InvalidTrajectoryState {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    /// Too many ensemble members failed.
    #[error("{failed} of {total} trajectories aborted (> 1% tolerated); first failure: {first}")]
    TrajectoryFailures {
        failed: usize,
        total: usize,
        #[source]
        first: Box<Error>,
    },

    /// Time grids of two data sets do not match.
    #[error("grid mismatch in {context}: {detail}")]
    GridMismatch {
        context: &'static str,
        detail: String,
    },

    /// An observable name was not found in an ensemble configuration.
    #[error("unknown observable '{name}'")]
    UnknownObservable { name: String },

    /// Unknown Pauli/preset name.
    #[error("unknown name '{name}'; expected one of {expected}")]
    UnknownName { name: String, expected: &'static str },

    /// Configuration file could not be parsed.
    #[error("config parse error: {message}")]
    ConfigParse { message: String },

    /// Configuration parsed but failed validation; all problems are listed.
    #[error("config validation failed:\n{}", errors.join("\n"))]
    ConfigValidation { errors: Vec<String> },

    /// An I/O failure while writing experiment outputs.
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    /// A run-configured assertion failed (CLI exit code 3).
    #[error("assertion failed: {}", failures.join("; "))]
    AssertionFailed { failures: Vec<String> },
}

impl Error {
    /// Exit code for the CLI: 1 validation, 2 numerical, 3 assertion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AssertionFailed { .. } => 3,
            Error::DegenerateSteadyState { .. }
            | Error::NonPhysicalKernel { .. }
            | Error::StateBlowup { .. }
            | Error::InvalidTrajectoryState { .. }
            | Error::TrajectoryFailures { .. }
            | Error::NotPositive { .. } => 2,
            _ => 1,
        }
    }
}
