// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Unconditional measurement dynamics and the steady-state invariance test.
//!
//! Continuously monitoring an operator `c` at rate Γ_m turns the
//! record-averaged (unconditional) generator into 𝓛 + Γ_m𝓓[c]: averaging
//! over measurement records eliminates the stochastic innovation term and
//! leaves pure measurement dephasing, independent of the efficiency η.
//!
//! The central certification this module provides: the stationary ensemble
//! is untouched by monitoring at *every* rate Γ_m if and only if the
//! measurement back-action vanishes on the steady state,
//!
//! ```text
//! 𝓓[c]ρ_ss = 0.
//! ```
//!
//! Sufficiency is checked directly as the Frobenius residual ‖𝓓[c]ρ_ss‖_F;
//! the "for all Γ_m" direction is operationalized as a finite sweep that
//! recomputes the steady state of 𝓛 + Γ_m𝓓[c] and measures its drift from
//! the unmonitored reference.

use crate::error::{Error, Result};
use crate::lindblad::{dissipator_apply, steady_state, LindbladModel};
use crate::operator::{DensityMatrix, Operator};

/// Default absolute tolerance on the invariance residual: far above
/// accumulated 64-bit solve error at d ≤ 32, far below any physically
/// meaningful violation.
pub const DEFAULT_INVARIANCE_TOL: f64 = 1e-10;

/// A continuous measurement channel: operator `c`, rate Γ_m, efficiency η.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringSpec {
    c: Operator,
    gamma_m: f64,
    eta: f64,
}

impl MonitoringSpec {
    /// Validates Γ_m ≥ 0 and 0 ≤ η ≤ 1.
    pub fn new(c: Operator, gamma_m: f64, eta: f64) -> Result<Self> {
        if !(gamma_m >= 0.0) || !gamma_m.is_finite() {
            return Err(Error::RangeError {
                field: "gamma_m",
                value: gamma_m,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::RangeError { field: "eta", value: eta, min: 0.0, max: 1.0 });
        }
        Ok(Self { c, gamma_m, eta })
    }

    /// The measurement operator c.
    pub fn c(&self) -> &Operator {
        &self.c
    }

    /// Measurement rate Γ_m (1/time).
    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }

    /// Detector efficiency η ∈ [0, 1].
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// A copy with a different rate (used by sweeps).
    pub fn with_gamma_m(&self, gamma_m: f64) -> Result<Self> {
        Self::new(self.c.clone(), gamma_m, self.eta)
    }
}

/// Outcome of an invariance check.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    /// ‖𝓓[c]ρ_ss‖_F.
    pub residual_norm: f64,
    /// residual_norm ≤ tolerance.
    pub invariant: bool,
    /// Tolerance the verdict used.
    pub tolerance: f64,
    /// The steady state the residual was evaluated on.
    pub steady_state_used: DensityMatrix,
}

/// The unconditional measured model: 𝓛 + Γ_m𝓓[c], realized by appending
/// the jump operator √Γ_m·c.
///
/// η does not appear — record averaging removes the innovation term, so the
/// unconditional dynamics are efficiency-independent.
pub fn measured_liouvillian(model: &LindbladModel, spec: &MonitoringSpec) -> Result<LindbladModel> {
    if spec.c.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            context: "measured_liouvillian",
            expected: model.dim(),
            got: spec.c.dim(),
        });
    }
    model.with_extra_jump(spec.c.scaled(num_complex::Complex64::new(spec.gamma_m.sqrt(), 0.0)))
}

/// Checks the invariance condition 𝓓[c]ρ_ss = 0 for the model's steady
/// state; the steady state itself is computed here (propagating
/// [`Error::DegenerateSteadyState`] if it is not unique).
pub fn invariance_check(
    model: &LindbladModel,
    c: &Operator,
    tolerance: f64,
) -> Result<InvarianceReport> {
    let rho_ss = steady_state(model)?;
    let residual = dissipator_apply(c, rho_ss.operator())?;
    let residual_norm = residual.frobenius_norm();
    Ok(InvarianceReport {
        residual_norm,
        invariant: residual_norm <= tolerance,
        tolerance,
        steady_state_used: rho_ss,
    })
}

/// One point of a Γ_m sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Measurement rate of this point.
    pub gamma_m: f64,
    /// Steady state of 𝓛 + Γ_m𝓓[c] and its drift from the Γ_m = 0
    /// reference, or the per-point failure (the sweep continues past
    /// degenerate points).
    pub outcome: Result<SweepOutcome>,
}

/// Successful sweep-point payload.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Steady state of the measured generator at this Γ_m.
    pub steady_state: DensityMatrix,
    /// ‖ρ_ss(Γ_m) − ρ_ss(0)‖_F against the fixed unmonitored reference
    /// (not consecutive differences).
    pub drift: f64,
}

/// Sweeps the measured steady state over the given rates.
///
/// The drift reference is always the steady state of the *unmonitored*
/// model; the invariance theorem predicts drift ≡ 0 across the sweep
/// exactly when 𝓓[c]ρ_ss(0) = 0.  Fails outright only if the reference
/// itself cannot be computed; per-point failures are recorded in place.
pub fn gamma_sweep(model: &LindbladModel, c: &Operator, gammas: &[f64]) -> Result<Vec<SweepPoint>> {
    let reference = steady_state(model)?;
    let mut points = Vec::with_capacity(gammas.len());
    for &gamma_m in gammas {
        let outcome = sweep_point(model, c, gamma_m, &reference);
        points.push(SweepPoint { gamma_m, outcome });
    }
    Ok(points)
}

fn sweep_point(
    model: &LindbladModel,
    c: &Operator,
    gamma_m: f64,
    reference: &DensityMatrix,
) -> Result<SweepOutcome> {
    if !(gamma_m >= 0.0) || !gamma_m.is_finite() {
        return Err(Error::RangeError {
            field: "gamma_m",
            value: gamma_m,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let measured = model
        .with_extra_jump(c.scaled(num_complex::Complex64::new(gamma_m.sqrt(), 0.0)))?;
    let rho = steady_state(&measured)?;
    let drift = rho.operator().frobenius_distance(reference.operator());
    Ok(SweepOutcome { steady_state: rho, drift })
}

/// Default sweep grid: 8 logarithmically spaced rates spanning
/// [10⁻², 10¹] times the characteristic dissipation rate.
pub fn default_sweep_gammas(characteristic_rate: f64) -> Vec<f64> {
    let n = 8;
    (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            characteristic_rate * 10f64.powf(-2.0 + 3.0 * t)
        })
        .collect()
}
