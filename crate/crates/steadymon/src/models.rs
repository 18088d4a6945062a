// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Built-in model presets and their closed-form references.
//!
//! The worked example throughout the crate is a qubit thermalized by
//! incoherent excitation and relaxation,
//!
//! ```text
//! ρ̇ = γ↓𝓓[σ₋]ρ + γ↑𝓓[σ₊]ρ,   ρ_ss = diag(1 − p, p),   p = γ↑/(γ↑ + γ↓),
//! ```
//!
//! a standard amplitude-damping-plus-pumping channel (Breuer &
//! Petruccione, *The Theory of Open Quantum Systems*, §3.4).  Monitoring
//! the population observable σ_z is quantum non-demolition for this
//! model: 𝓓[σ_z]ρ_ss = 0 because ρ_ss is diagonal, so the steady
//! ensemble is invariant at every measurement rate.  Monitoring σ_x is
//! the matching counterexample: for p ≠ ½ it drags the populations
//! toward ½ at a Γ_m-dependent rate, giving the measured steady excited
//! population (γ↑ + Γ_m)/(γ↑ + γ↓ + 2Γ_m).

use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::monitor::MonitoringSpec;
use crate::operator::{pauli, C64, DensityMatrix, Operator, Pauli};

/// Rates of the thermalized qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitThermalParams {
    gamma_down: f64,
    gamma_up: f64,
}

impl QubitThermalParams {
    /// Validates γ↓ ≥ 0, γ↑ ≥ 0 (finite), and γ↓ + γ↑ > 0 — a unique
    /// steady state needs nonzero dissipation.
    pub fn new(gamma_down: f64, gamma_up: f64) -> Result<Self> {
        for (field, value) in [("gamma_down", gamma_down), ("gamma_up", gamma_up)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::RangeError { field, value, min: 0.0, max: f64::INFINITY });
            }
        }
        if gamma_down + gamma_up == 0.0 {
            return Err(Error::AllRatesZero);
        }
        Ok(Self { gamma_down, gamma_up })
    }

    /// Relaxation rate γ↓ (1/time).
    pub fn gamma_down(&self) -> f64 {
        self.gamma_down
    }

    /// Excitation rate γ↑ (1/time).
    pub fn gamma_up(&self) -> f64 {
        self.gamma_up
    }

    /// The total rate γ↑ + γ↓ (the population mixing rate).
    pub fn total_rate(&self) -> f64 {
        self.gamma_down + self.gamma_up
    }

    /// The steady excited-state population p = γ↑/(γ↑ + γ↓).
    pub fn excited_population(&self) -> f64 {
        self.gamma_up / self.total_rate()
    }
}

/// The thermalized qubit: H = 0, jumps √γ↓·σ₋ and √γ↑·σ₊.
pub fn thermal_qubit(params: &QubitThermalParams) -> LindbladModel {
    LindbladModel::new(
        Operator::zeros(2),
        vec![
            pauli(Pauli::Minus).scaled(C64::new(params.gamma_down.sqrt(), 0.0)),
            pauli(Pauli::Plus).scaled(C64::new(params.gamma_up.sqrt(), 0.0)),
        ],
    )
    .expect("fixed 2x2 construction cannot fail")
}

/// The thermal qubit with a detuning Hamiltonian ε·σ_z/2.
///
/// The invariance criterion 𝓓[c]ρ_ss = 0 does not reference the
/// Hamiltonian, and ε·σ_z/2 commutes with both the diagonal steady state
/// and the σ_z monitor, so this must change no steady-state or
/// invariance result.  It exists as a regression guard for that claim;
/// `detuning = 0` recovers [`thermal_qubit`] exactly.
pub fn thermal_qubit_with_detuning(params: &QubitThermalParams, detuning: f64) -> LindbladModel {
    LindbladModel::new(
        pauli(Pauli::Z).scaled(C64::new(0.5 * detuning, 0.0)),
        vec![
            pauli(Pauli::Minus).scaled(C64::new(params.gamma_down.sqrt(), 0.0)),
            pauli(Pauli::Plus).scaled(C64::new(params.gamma_up.sqrt(), 0.0)),
        ],
    )
    .expect("sigma_z is Hermitian; construction cannot fail")
}

/// The closed-form steady state diag(1 − p, p), p = γ↑/(γ↑ + γ↓).
pub fn thermal_qubit_steady_state(params: &QubitThermalParams) -> DensityMatrix {
    let p = params.excited_population();
    let zero = C64::new(0.0, 0.0);
    DensityMatrix::new(
        Operator::from_rows(&[
            vec![C64::new(1.0 - p, 0.0), zero],
            vec![zero, C64::new(p, 0.0)],
        ])
        .expect("square rows"),
    )
    .expect("diagonal probabilities form a valid state")
}

/// Continuous monitoring of the population observable: c = σ_z.
pub fn qnd_monitoring(gamma_m: f64, eta: f64) -> Result<MonitoringSpec> {
    MonitoringSpec::new(pauli(Pauli::Z), gamma_m, eta)
}

/// The necessity-direction fixture: the thermal qubit paired with
/// c = σ_x, for which 𝓓[σ_x]ρ_ss = √2·|2p − 1| ≠ 0 whenever p ≠ ½.
///
/// Fails with `DegenerateChoice` at γ↑ = γ↓: then ρ_ss = diag(½, ½) is
/// invariant under σ_x conjugation too and the fixture shows nothing.
pub fn counterexample_qubit(params: &QubitThermalParams) -> Result<(LindbladModel, Operator)> {
    if params.gamma_up == params.gamma_down {
        return Err(Error::DegenerateChoice);
    }
    Ok((thermal_qubit(params), pauli(Pauli::X)))
}

/// The excited population of the σ_x-measured steady state,
/// p₁(Γ_m) = (γ↑ + Γ_m)/(γ↑ + γ↓ + 2Γ_m).
///
/// Rate-equation derivation: 𝓓[σ_x] flips populations at rate Γ_m each
/// way, so balance gives γ↑(1−p₁) + Γ_m(1 − 2p₁) = γ↓p₁.  As Γ_m → ∞
/// the measurement wins and p₁ → ½.
pub fn sigma_x_measured_population(params: &QubitThermalParams, gamma_m: f64) -> f64 {
    (params.gamma_up + gamma_m) / (params.total_rate() + 2.0 * gamma_m)
}

/// One bundled measurement channel of a preset, with the invariance
/// verdict the model predicts for it.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetMeasurement {
    /// Name usable in configs (e.g. "sigma_z").
    pub name: &'static str,
    /// The measurement operator.
    pub operator: Operator,
    /// Whether 𝓓[c]ρ_ss = 0 is expected for this preset's parameters.
    pub expected_invariant: bool,
}

/// A named, fully constructed preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    /// Registry name.
    pub name: &'static str,
    /// The Lindblad model.
    pub model: LindbladModel,
    /// Closed-form steady state.
    pub steady_state: DensityMatrix,
    /// Bundled measurement operators with expected invariance verdicts.
    pub measurements: Vec<PresetMeasurement>,
}

/// Names accepted by [`build_preset`] (and by the CLI `model.preset`
/// field).
pub fn preset_names() -> &'static [&'static str] {
    &["thermal_qubit", "counterexample_qubit"]
}

/// Builds a registered preset by name.
///
/// * `thermal_qubit` — the thermal qubit bundled with σ_z (invariant)
///   and σ_x (invariant only at γ↑ = γ↓).
/// * `counterexample_qubit` — the same model restricted to the σ_x
///   fixture; requires γ↑ ≠ γ↓ (`DegenerateChoice` otherwise).
pub fn build_preset(name: &str, params: &QubitThermalParams) -> Result<Preset> {
    match name {
        "thermal_qubit" => Ok(Preset {
            name: "thermal_qubit",
            model: thermal_qubit(params),
            steady_state: thermal_qubit_steady_state(params),
            measurements: vec![
                PresetMeasurement {
                    name: "sigma_z",
                    operator: pauli(Pauli::Z),
                    expected_invariant: true,
                },
                PresetMeasurement {
                    name: "sigma_x",
                    operator: pauli(Pauli::X),
                    expected_invariant: params.gamma_up == params.gamma_down,
                },
            ],
        }),
        "counterexample_qubit" => {
            let (model, c) = counterexample_qubit(params)?;
            Ok(Preset {
                name: "counterexample_qubit",
                model,
                steady_state: thermal_qubit_steady_state(params),
                measurements: vec![PresetMeasurement {
                    name: "sigma_x",
                    operator: c,
                    expected_invariant: false,
                }],
            })
        }
        other => Err(Error::UnknownName {
            name: other.to_owned(),
            expected: "thermal_qubit, counterexample_qubit",
        }),
    }
}
