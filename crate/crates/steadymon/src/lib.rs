// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! # steadymon
//!
//! Simulation toolkit for continuous weak measurement of driven–dissipative
//! quantum systems.
//!
//! The library answers one physical question quantitatively: *when does
//! continuously monitoring an open quantum system leave its stationary
//! ensemble untouched?*  A Markovian system relaxing under a Lindblad
//! generator 𝓛 admits a steady state ρ_ss.  Adding a continuous weak
//! measurement of an operator `c` at rate Γ_m modifies the unconditional
//! (record-averaged) dynamics to 𝓛 + Γ_m𝓓[c]; the stationary ensemble is
//! unchanged for *every* Γ_m precisely when the measurement back-action
//! vanishes on the steady state, 𝓓[c]ρ_ss = 0.  Individual measurement
//! records still condition the state and drive stochastic localization
//! ("partial collapse"), which the native dissipation subsequently undoes
//! ("dissipative uncollapse") — the ensemble average never moves.
//!
//! ## Module map
//!
//! - [`operator`] — dense complex operator algebra (`Operator`,
//!   `DensityMatrix`) and Pauli/ladder constructors.
//! - [`superop`] — column-stacking vectorization and superoperator matrices.
//! - [`lindblad`] — the Lindblad generator, its matrix form, steady states
//!   via nullspace solve, and deterministic propagation.
//! - [`monitor`] — unconditional measurement dynamics, the invariance
//!   checker, and the Γ_m sweep (necessity test).
//! - [`noise`] — counter-based deterministic Gaussian noise streams.
//! - [`trajectory`] — diffusive stochastic-master-equation integration of a
//!   single conditioned trajectory with a synthesized measurement record.
//! - [`ensemble`] — parallel trajectory ensembles, record-averaged
//!   statistics, uncollapse and bimodality diagnostics.
//! - [`models`] — built-in presets (thermal qubit, QND monitoring, the σ_x
//!   counterexample) with closed-form references.
//! - [`config`] / [`runner`] — config-file driven experiments behind the
//!   `steadymon` CLI.
//!
//! ## Conventions (fixed project-wide)
//!
//! - Basis ordering is (|0⟩, |1⟩) with σ_z = diag(+1, −1), so ⟨σ_z⟩ = +1 on
//!   |0⟩; σ_− = |0⟩⟨1| and σ_+ = |1⟩⟨0|.
//! - Jump operators carry their rates as √γ·L; no separate rate field.
//! - Vectorization is column-stacking: vec(XρY) = (Yᵀ ⊗ X)·vec(ρ).
//! - The stochastic master equation is read in the Itô convention, with
//!   Wiener increments of variance dt.
//! - ħ = 1; Hamiltonians are angular frequencies, rates are inverse time.
//!
//! Background: Breuer & Petruccione, *The Theory of Open Quantum Systems*
//! (Lindblad form); Wiseman & Milburn, *Quantum Measurement and Control*
//! (diffusive unravelings and homodyne-type records); Jacobs & Steck,
//! *A straightforward introduction to continuous quantum measurement*.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod lindblad;
pub mod models;
pub mod monitor;
pub mod noise;
pub mod operator;
pub mod runner;
pub mod superop;
pub mod trajectory;

pub use ensemble::{
    bimodality_report, dissipative_uncollapse_metric, run_ensemble, EnsembleConfig, EnsembleStats,
};
pub use error::{Error, Result};
pub use config::{
    operator_to_rows, parse_config, Assertions, ExperimentConfig, ExperimentKind, InitialState,
    ModelSpec, OutputSpec,
};
pub use models::{
    build_preset, counterexample_qubit, preset_names, qnd_monitoring,
    sigma_x_measured_population, thermal_qubit, thermal_qubit_steady_state,
    thermal_qubit_with_detuning, Preset, PresetMeasurement, QubitThermalParams,
};
pub use lindblad::{
    dissipator_apply, liouvillian_apply, liouvillian_matrix, propagate, steady_state,
    LindbladModel,
};
pub use monitor::{
    gamma_sweep, invariance_check, measured_liouvillian, InvarianceReport, MonitoringSpec,
    SweepOutcome, SweepPoint,
};
pub use noise::{derive_trajectory_seed, CounterRng};
pub use operator::{
    anticommutator, commutator, pauli, DensityMatrix, Operator, Pauli,
};
pub use runner::{
    resolve_initial_state, run_experiment, write_outputs, RunArtifacts, Table,
};
pub use superop::{devectorize, left_mult_super, right_mult_super, vectorize, Superoperator};
pub use trajectory::{
    first_passage_time, innovation_apply, record_increment, simulate_trajectory, sme_step,
    MeasurementRecord, TrajectoryConfig, TrajectoryPath,
};
