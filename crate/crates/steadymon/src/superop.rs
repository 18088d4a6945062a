// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Column-stacking vectorization and superoperator matrices.
//!
//! A linear map on operators (a superoperator) becomes an ordinary
//! d²×d² matrix acting on vectorized operators.  The stacking convention is
//! fixed project-wide as **column-stacking**: vec(A) concatenates the
//! columns of A, so that
//!
//! ```text
//! vec(XρY) = (Yᵀ ⊗ X)·vec(ρ).
//! ```
//!
//! In particular vec(Xρ) = (I ⊗ X)vec(ρ) and vec(ρY) = (Yᵀ ⊗ I)vec(ρ).
//! Since the backing matrices are stored column-major, vectorization is a
//! layout-preserving copy and device round trips are bitwise exact.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::Operator;

/// A d²×d² complex matrix acting on column-vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: DMatrix<C64>,
}

impl Superoperator {
    /// Wraps a d²×d² matrix for Hilbert dimension d.
    pub fn from_matrix(dim: usize, mat: DMatrix<C64>) -> Result<Self> {
        let d2 = dim * dim;
        if dim == 0 || mat.nrows() != d2 || mat.ncols() != d2 {
            return Err(Error::LengthMismatch { len: mat.nrows(), dim });
        }
        Ok(Self { dim, mat })
    }

    /// The zero superoperator on dimension d.
    pub fn zeros(dim: usize) -> Self {
        Self { dim, mat: DMatrix::zeros(dim * dim, dim * dim) }
    }

    /// The identity superoperator on dimension d.
    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: DMatrix::identity(dim * dim, dim * dim) }
    }

    /// Hilbert-space dimension d (the matrix is d²×d²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Borrow the backing d²×d² matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Consume into the backing matrix.
    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    /// Apply to an operator: devectorize(M·vec(A)).
    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "superoperator apply",
                expected: self.dim,
                got: a.dim(),
            });
        }
        let v = vectorize(a);
        devectorize(&(&self.mat * v), self.dim)
    }

    /// Frobenius norm of the backing matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }
}

macro_rules! impl_super_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&Superoperator> for &Superoperator {
            type Output = Superoperator;
            fn $method(self, rhs: &Superoperator) -> Superoperator {
                assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
                Superoperator { dim: self.dim, mat: &self.mat $op &rhs.mat }
            }
        }
    };
}
impl_super_binop!(Add, add, +);
impl_super_binop!(Sub, sub, -);
// Composition: (M·N)(ρ) = M(N(ρ)).
impl_super_binop!(Mul, mul, *);

impl std::ops::Mul<f64> for &Superoperator {
    type Output = Superoperator;
    fn mul(self, s: f64) -> Superoperator {
        Superoperator { dim: self.dim, mat: &self.mat * C64::new(s, 0.0) }
    }
}

/// Column-stacking vectorization vec(A).
pub fn vectorize(a: &Operator) -> DVector<C64> {
    DVector::from_column_slice(a.matrix().as_slice())
}

/// Inverse of [`vectorize`]: rebuilds a d×d operator from a d² vector.
pub fn devectorize(v: &DVector<C64>, dim: usize) -> Result<Operator> {
    if v.len() != dim * dim {
        return Err(Error::LengthMismatch { len: v.len(), dim });
    }
    Operator::from_matrix(DMatrix::from_column_slice(dim, dim, v.as_slice()))
}

/// Superoperator of left multiplication, ρ ↦ Xρ, i.e. I ⊗ X.
pub fn left_mult_super(x: &Operator) -> Superoperator {
    let d = x.dim();
    let id = DMatrix::<C64>::identity(d, d);
    Superoperator { dim: d, mat: id.kronecker(x.matrix()) }
}

/// Superoperator of right multiplication, ρ ↦ ρY, i.e. Yᵀ ⊗ I.
pub fn right_mult_super(y: &Operator) -> Superoperator {
    let d = y.dim();
    let id = DMatrix::<C64>::identity(d, d);
    Superoperator { dim: d, mat: y.matrix().transpose().kronecker(&id) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli, Pauli};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn op_from(rows: &[Vec<C64>]) -> Operator {
        Operator::from_rows(rows).unwrap()
    }

    #[test]
    fn vectorize_zero_is_zero_vector() {
        let v = vectorize(&Operator::zeros(3));
        assert_eq!(v.len(), 9);
        assert!(v.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn left_and_right_identity_are_identity_superoperators() {
        let i2 = Operator::identity(2);
        assert_eq!(left_mult_super(&i2), Superoperator::identity(2));
        assert_eq!(right_mult_super(&i2), Superoperator::identity(2));
    }

    #[test]
    fn sandwich_matches_kronecker_form() {
        // vec(XρY) = (Yᵀ⊗X)vec(ρ) on explicit 2×2 inputs.
        let x = op_from(&[vec![c(1.0, 1.0), c(0.0, -2.0)], vec![c(0.5, 0.0), c(2.0, 1.0)]]);
        let y = op_from(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(-1.0, 0.5), c(0.25, 0.0)]]);
        let rho = op_from(&[vec![c(0.6, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.4, 0.0)]]);
        let direct = &(&x * &rho) * &y;
        let via_super = (&left_mult_super(&x) * &right_mult_super(&y))
            .apply(&rho)
            .unwrap();
        assert!(via_super.frobenius_distance(&direct) <= 1e-12 * direct.frobenius_norm());
    }

    #[test]
    fn apply_checks_dimension() {
        let s = Superoperator::identity(2);
        assert!(s.apply(&Operator::identity(3)).is_err());
    }

    #[test]
    fn devectorize_checks_length() {
        let v = DVector::from_element(5, c(0.0, 0.0));
        assert!(devectorize(&v, 2).is_err());
    }

    #[test]
    fn pauli_left_multiplication_acts_correctly() {
        let sz = pauli(Pauli::Z);
        let sx = pauli(Pauli::X);
        let want = &sz * &sx;
        let got = left_mult_super(&sz).apply(&sx).unwrap();
        assert_eq!(got, want);
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    fn arb_operator(dim: usize) -> impl Strategy<Value = Operator> {
        proptest::collection::vec(arb_c64(), dim * dim).prop_map(move |v| {
            Operator::from_matrix(DMatrix::from_vec(dim, dim, v)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bitwise_exact(a in arb_operator(4)) {
            let back = devectorize(&vectorize(&a), 4).unwrap();
            // Bitwise: every entry identical, not merely close.
            prop_assert_eq!(a, back);
        }

        #[test]
        fn super_matrix_matches_map_on_random_inputs(
            x in arb_operator(2),
            y in arb_operator(2),
            rho in arb_operator(2),
        ) {
            let direct = &(&x * &rho) * &y;
            let m = &left_mult_super(&x) * &right_mult_super(&y);
            let via = m.apply(&rho).unwrap();
            let scale = direct.frobenius_norm().max(1.0);
            prop_assert!(via.frobenius_distance(&direct) <= 1e-12 * scale);
        }
    }
}
