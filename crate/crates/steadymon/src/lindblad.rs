// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! The unconditional Lindblad generator, its matrix form, steady states,
//! and deterministic propagation.
//!
//! A Markovian open system evolves under
//!
//! ```text
//! ρ̇ = 𝓛ρ = −i[H, ρ] + Σ_k ( L_k ρ L_k† − ½{L_k†L_k, ρ} ),
//! ```
//!
//! with ħ = 1 and decay rates folded into the jump operators as √γ·L.
//! The steady state solves 𝓛ρ_ss = 0; it is found here as the kernel of
//! the vectorized Liouvillian via singular-value decomposition, which gives
//! robust rank detection and an explicit degeneracy signal (the Γ_m-sweep
//! necessity test depends on trusting kernel dimensions).
//!
//! Ref: Breuer & Petruccione, *The Theory of Open Quantum Systems*, ch. 3.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{anticommutator, check_dims, commutator, DensityMatrix, Operator};
use crate::superop::{devectorize, left_mult_super, right_mult_super, vectorize, Superoperator};

/// Relative singular-value threshold below which a direction counts as
/// kernel: σ ≤ `KERNEL_RTOL`·σ_max.
pub const KERNEL_RTOL: f64 = 1e-10;

/// Minimum |trace| for a kernel vector to be normalizable into a state.
pub const KERNEL_TRACE_TOL: f64 = 1e-12;

/// Hamiltonian plus jump operators (rates folded in as √γ·L).
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
}

impl LindbladModel {
    /// Builds a model, checking that H is Hermitian (defect ≤ 1e-12
    /// relative to max(1, ‖H‖_F)) and that all operators share one
    /// dimension.
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let defect = hamiltonian.hermiticity_defect();
        let scale = hamiltonian.frobenius_norm().max(1.0);
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian { defect, tol: 1e-12 * scale });
        }
        for j in &jumps {
            check_dims("LindbladModel jump operator", &hamiltonian, j)?;
        }
        Ok(Self { hamiltonian, jumps })
    }

    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// The Hamiltonian H.
    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    /// The jump operators (each √γ·L).
    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    /// A copy of this model with one more jump operator appended.
    pub fn with_extra_jump(&self, jump: Operator) -> Result<Self> {
        check_dims("with_extra_jump", &self.hamiltonian, &jump)?;
        let mut jumps = self.jumps.clone();
        jumps.push(jump);
        Ok(Self { hamiltonian: self.hamiltonian.clone(), jumps })
    }
}

/// The Lindblad dissipator 𝓓[L]ρ = LρL† − ½{L†L, ρ}.
///
/// Output is traceless whenever ρ is Hermitian (to rounding).
pub fn dissipator_apply(l: &Operator, rho: &Operator) -> Result<Operator> {
    check_dims("dissipator_apply", l, rho)?;
    let ld = l.dagger();
    let sandwich = &(l * rho) * &ld;
    let ldl = &ld * l;
    let anti = anticommutator(&ldl, rho)?;
    Ok(&sandwich - &anti.scaled(C64::new(0.5, 0.0)))
}

/// The full generator 𝓛ρ = −i[H, ρ] + Σ_k 𝓓[L_k]ρ.
pub fn liouvillian_apply(model: &LindbladModel, rho: &Operator) -> Result<Operator> {
    check_dims("liouvillian_apply", model.hamiltonian(), rho)?;
    let comm = commutator(model.hamiltonian(), rho)?;
    let mut out = comm.scaled(C64::new(0.0, -1.0));
    for l in model.jumps() {
        out = &out + &dissipator_apply(l, rho)?;
    }
    Ok(out)
}

/// Matrix form of the dissipator under column-stacking:
/// 𝓓[L] = conj(L)⊗L − ½(I⊗L†L + (L†L)ᵀ⊗I).
pub fn dissipator_super(l: &Operator) -> Superoperator {
    let ld = l.dagger();
    let ldl = &ld * l;
    let sandwich = &left_mult_super(l) * &right_mult_super(&ld);
    let anti = &left_mult_super(&ldl) + &right_mult_super(&ldl);
    &sandwich - &(&anti * 0.5)
}

/// Matrix form of the full generator 𝓛.
pub fn liouvillian_matrix(model: &LindbladModel) -> Superoperator {
    let h = model.hamiltonian();
    let comm = &left_mult_super(h) - &right_mult_super(h);
    let mut mat = comm.into_matrix();
    mat *= C64::new(0.0, -1.0);
    let mut out = Superoperator::from_matrix(model.dim(), mat).expect("square by construction");
    for l in model.jumps() {
        out = &out + &dissipator_super(l);
    }
    out
}

/// The unique steady state 𝓛ρ_ss = 0, from the SVD kernel of the
/// vectorized Liouvillian.
///
/// The kernel is the right-singular subspace at σ ≤ 1e-10·σ_max.  Exactly
/// one kernel direction must exist; otherwise [`Error::DegenerateSteadyState`]
/// reports the computed dimension.  The kernel vector is phase-aligned so
/// its trace is real and positive, hermitized, and trace-normalized;
/// a kernel trace below 1e-12 is rejected as [`Error::NonPhysicalKernel`].
///
/// Post: ‖𝓛ρ_ss‖_F ≤ 1e-10 (for the rate scales this library targets),
/// Hermitian, unit trace, PSD to the default tolerance.
pub fn steady_state(model: &LindbladModel) -> Result<DensityMatrix> {
    let d = model.dim();
    let sup = liouvillian_matrix(model);
    let svd = sup.into_matrix().svd(true, true);
    let sigma = &svd.singular_values; // descending order
    let sigma_max = sigma[0];
    let thresh = KERNEL_RTOL * sigma_max;
    // `<=` so the all-zero generator (σ_max = 0) counts every direction.
    let kernel_dim = sigma.iter().filter(|&&s| s <= thresh).count();
    if kernel_dim != 1 {
        return Err(Error::DegenerateSteadyState { kernel_dim });
    }
    let v_t = svd.v_t.as_ref().expect("requested in svd call");
    // Right-singular vector of the smallest σ: V = (V^H)^H, column = last row
    // of v_t conjugated (singular values are descending).
    let row = v_t.row(v_t.nrows() - 1);
    let v: DVector<C64> = row.adjoint();
    let op = devectorize(&v, d)?;
    // SVD fixes the vector only up to a global phase; rotate so the trace is
    // real and positive, otherwise hermitizing could cancel a valid state.
    let tr = op.trace();
    let mag = tr.norm();
    if mag < KERNEL_TRACE_TOL {
        return Err(Error::NonPhysicalKernel { trace_magnitude: mag });
    }
    let phase = tr.conj() / C64::new(mag, 0.0);
    let aligned = op.scaled(phase).hermitize();
    let normalized = aligned.scaled(C64::new(1.0 / mag, 0.0));
    DensityMatrix::new(normalized)
}

/// Deterministic propagation of ρ̇ = 𝓛ρ with the classic 4th-order
/// Runge–Kutta scheme at fixed step.
///
/// The number of steps is round(t_final/dt) (so the effective step divides
/// t_final exactly); t_final = 0 returns ρ0.  Trace drift over a run stays
/// below 1e-9 (the RK4 increments are traceless up to rounding).
pub fn propagate(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepSizeInvalid { dt });
    }
    if t_final < 0.0 || !t_final.is_finite() {
        return Err(Error::RangeError {
            field: "t_final",
            value: t_final,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if model.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            context: "propagate",
            expected: model.dim(),
            got: rho0.dim(),
        });
    }
    let n_steps = (t_final / dt).round() as usize;
    if n_steps == 0 {
        return Ok(rho0.clone());
    }
    let h = t_final / n_steps as f64;
    let m = liouvillian_matrix(model).into_matrix();
    let mut v = vectorize(rho0.operator());
    for _ in 0..n_steps {
        let k1 = &m * &v;
        let k2 = &m * &(&v + &(&k1 * C64::new(h / 2.0, 0.0)));
        let k3 = &m * &(&v + &(&k2 * C64::new(h / 2.0, 0.0)));
        let k4 = &m * &(&v + &(&k3 * C64::new(h, 0.0)));
        let mut incr = k1;
        incr += &k2 * C64::new(2.0, 0.0);
        incr += &k3 * C64::new(2.0, 0.0);
        incr += k4;
        v += incr * C64::new(h / 6.0, 0.0);
    }
    let op = devectorize(&v, model.dim())?.hermitize();
    // Trace tolerance relaxed to the documented 1e-9 drift bound.
    DensityMatrix::with_tolerances(op, DensityMatrix::HERMITICITY_TOL, 1e-9, DensityMatrix::PSD_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli, Pauli};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Thermal qubit built by hand (the `models` preset is tested separately).
    fn thermal(gamma_down: f64, gamma_up: f64) -> LindbladModel {
        let jumps = vec![
            pauli(Pauli::Minus).scaled(c(gamma_down.sqrt(), 0.0)),
            pauli(Pauli::Plus).scaled(c(gamma_up.sqrt(), 0.0)),
        ];
        LindbladModel::new(Operator::zeros(2), jumps).unwrap()
    }

    fn diag(p0: f64, p1: f64) -> Operator {
        Operator::from_rows(&[vec![c(p0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(p1, 0.0)]])
            .unwrap()
    }

    #[test]
    fn model_rejects_non_hermitian_hamiltonian() {
        let h = pauli(Pauli::Minus); // not Hermitian
        assert!(matches!(
            LindbladModel::new(h, vec![]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn model_rejects_mismatched_jump_dims() {
        let h = Operator::zeros(3);
        assert!(LindbladModel::new(h, vec![pauli(Pauli::Minus)]).is_err());
    }

    #[test]
    fn dissipator_annihilates_diagonal_states_for_sigma_z() {
        let out = dissipator_apply(&pauli(Pauli::Z), &diag(0.75, 0.25)).unwrap();
        assert!(out.frobenius_norm() <= 1e-15);
    }

    #[test]
    fn dissipator_of_zero_is_zero() {
        let out = dissipator_apply(&pauli(Pauli::X), &Operator::zeros(2)).unwrap();
        assert_eq!(out.frobenius_norm(), 0.0);
    }

    #[test]
    fn dissipator_sigma_z_dephases_coherence_at_rate_2() {
        // 𝓓[σ_z]|0⟩⟨1| = σ_z|0⟩⟨1|σ_z − |0⟩⟨1| = −2|0⟩⟨1|.
        let coh = pauli(Pauli::Minus); // |0⟩⟨1|
        let out = dissipator_apply(&pauli(Pauli::Z), &coh).unwrap();
        let expect = coh.scaled(c(-2.0, 0.0));
        assert_relative_eq!(out.frobenius_distance(&expect), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn liouvillian_annihilates_thermal_steady_state() {
        let model = thermal(3.0, 1.0);
        let rho_ss = diag(0.75, 0.25);
        let out = liouvillian_apply(&model, &rho_ss).unwrap();
        assert!(out.frobenius_norm() <= 1e-12);
    }

    #[test]
    fn trivial_generator_is_zero() {
        let model = LindbladModel::new(Operator::zeros(2), vec![]).unwrap();
        let rho = Operator::from_rows(&[
            vec![c(0.3, 0.0), c(0.1, -0.4)],
            vec![c(0.1, 0.4), c(0.7, 0.0)],
        ])
        .unwrap();
        assert_eq!(liouvillian_apply(&model, &rho).unwrap().frobenius_norm(), 0.0);
        assert_eq!(liouvillian_matrix(&model).frobenius_norm(), 0.0);
    }

    #[test]
    fn pure_decay_from_excited_state() {
        // γ↓=1, γ↑=0 on |1⟩⟨1|: gain |0⟩⟨0|, loss |1⟩⟨1| → diag(+1, −1).
        let model = thermal(1.0, 0.0);
        let out = liouvillian_apply(&model, &diag(0.0, 1.0)).unwrap();
        assert_relative_eq!(out.frobenius_distance(&diag(1.0, -1.0)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn matrix_and_map_forms_agree() {
        let model = thermal(3.0, 1.0);
        let sup = liouvillian_matrix(&model);
        let rho = Operator::from_rows(&[
            vec![c(0.6, 0.0), c(0.2, 0.1)],
            vec![c(0.2, -0.1), c(0.4, 0.0)],
        ])
        .unwrap();
        let via_matrix = sup.apply(&rho).unwrap();
        let via_map = liouvillian_apply(&model, &rho).unwrap();
        let scale = via_map.frobenius_norm().max(1.0);
        assert!(via_matrix.frobenius_distance(&via_map) <= 1e-12 * scale);
    }

    #[test]
    fn steady_state_matches_closed_form() {
        let rho = steady_state(&thermal(3.0, 1.0)).unwrap();
        assert!(rho.operator().frobenius_distance(&diag(0.75, 0.25)) <= 1e-12);

        let sym = steady_state(&thermal(1.0, 1.0)).unwrap();
        assert!(sym.operator().frobenius_distance(&diag(0.5, 0.5)) <= 1e-12);

        let ground = steady_state(&thermal(1.0, 0.0)).unwrap();
        assert!(ground.operator().frobenius_distance(&diag(1.0, 0.0)) <= 1e-12);
    }

    #[test]
    fn steady_state_residual_is_tiny() {
        let model = thermal(3.0, 1.0);
        let rho = steady_state(&model).unwrap();
        let resid = liouvillian_apply(&model, rho.operator()).unwrap();
        assert!(resid.frobenius_norm() <= 1e-10);
    }

    #[test]
    fn hamiltonian_only_model_is_degenerate() {
        // −i[σ_z, ·] has a two-dimensional kernel on a qubit (all diagonals).
        let model = LindbladModel::new(pauli(Pauli::Z), vec![]).unwrap();
        match steady_state(&model) {
            Err(Error::DegenerateSteadyState { kernel_dim }) => assert_eq!(kernel_dim, 2),
            other => panic!("expected DegenerateSteadyState, got {other:?}"),
        }
    }

    #[test]
    fn propagate_zero_time_returns_input() {
        let model = thermal(3.0, 1.0);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        let out = propagate(&model, &rho0, 0.0, 1e-3).unwrap();
        assert_eq!(out.operator(), rho0.operator());
    }

    #[test]
    fn propagate_rejects_bad_steps() {
        let model = thermal(3.0, 1.0);
        let rho0 = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            propagate(&model, &rho0, 1.0, 0.0),
            Err(Error::StepSizeInvalid { .. })
        ));
        assert!(matches!(
            propagate(&model, &rho0, -1.0, 0.1),
            Err(Error::RangeError { .. })
        ));
    }

    #[test]
    fn propagate_reaches_steady_state_at_long_times() {
        let model = thermal(3.0, 1.0);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        let t_final = 50.0 / 4.0; // 50/(γ↑+γ↓)
        let out = propagate(&model, &rho0, t_final, 1e-3).unwrap();
        assert!(out.operator().frobenius_distance(&diag(0.75, 0.25)) <= 1e-8);
    }

    #[test]
    fn population_relaxation_follows_rate_equation() {
        // p₁(t) = p + (1−p)e^{−(γ↑+γ↓)t} from p₁(0) = 1.
        let (gd, gu) = (3.0, 1.0);
        let gs = gd + gu;
        let p = gu / gs;
        let model = thermal(gd, gu);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        for &t in &[0.1, 0.25, 0.5, 1.0, 2.0] {
            let out = propagate(&model, &rho0, t, 1e-4).unwrap();
            let p1 = out.operator().get(1, 1).re;
            let expect = p + (1.0 - p) * (-gs * t).exp();
            assert!((p1 - expect).abs() <= 1e-6, "t={t}: {p1} vs {expect}");
        }
    }

    #[test]
    fn integrator_is_fourth_order() {
        // Halving dt must shrink the error against the analytic relaxation
        // by ~16×.  Step sizes chosen so both errors sit far above rounding.
        let (gd, gu) = (3.0, 1.0);
        let gs = gd + gu;
        let p = gu / gs;
        let model = thermal(gd, gu);
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        let t = 1.0;
        let exact = p + (1.0 - p) * (-gs * t).exp();
        let err = |dt: f64| {
            let out = propagate(&model, &rho0, t, dt).unwrap();
            (out.operator().get(1, 1).re - exact).abs()
        };
        let e1 = err(0.1);
        let e2 = err(0.05);
        let ratio = e1 / e2;
        assert!(
            (11.0..=22.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio} (e1={e1:.3e}, e2={e2:.3e})"
        );
    }

    proptest! {
        /// Trace preservation: |Tr 𝓛ρ| ≤ 1e-12·‖ρ‖_F for Hermitian ρ.
        #[test]
        fn generator_is_trace_free_on_hermitian_inputs(
            a in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
            gd in 0.1..5.0f64,
            gu in 0.1..5.0f64,
        ) {
            let raw = Operator::from_rows(&[
                vec![c(a[0].0, a[0].1), c(a[1].0, a[1].1)],
                vec![c(a[2].0, a[2].1), c(a[3].0, a[3].1)],
            ]).unwrap();
            let rho = raw.hermitize();
            let model = thermal(gd, gu);
            let out = liouvillian_apply(&model, &rho).unwrap();
            prop_assert!(out.trace().norm() <= 1e-12 * rho.frobenius_norm().max(f64::MIN_POSITIVE));
            // Hermiticity preservation, same tolerance scale.
            prop_assert!(out.hermiticity_defect() <= 1e-12 * out.frobenius_norm().max(f64::MIN_POSITIVE));
        }

        /// Closed-form steady state for random rate pairs (oracle:
        /// p = γ↑/(γ↑+γ↓)), matched to 1e-12.
        #[test]
        fn steady_state_matches_rate_formula(gd in 0.05..10.0f64, gu in 0.05..10.0f64) {
            let rho = steady_state(&thermal(gd, gu)).unwrap();
            let p = gu / (gu + gd);
            prop_assert!(rho.operator().frobenius_distance(&diag(1.0 - p, p)) <= 1e-12);
        }
    }
}
