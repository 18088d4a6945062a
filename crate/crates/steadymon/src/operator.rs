// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex operator algebra on a d-dimensional Hilbert space.
//!
//! [`Operator`] is the universal carrier for Hamiltonians, jump operators,
//! measurement operators, and (after validation) density matrices.  Storage
//! is dense `f64`-complex throughout: the target regime is d ≤ 32, where
//! superoperators reach 1024×1024 and sparsity machinery would be premature.
//!
//! Conventions fixed here and used everywhere:
//! - basis ordering (|0⟩, |1⟩): σ_z = diag(+1, −1), ⟨σ_z⟩ = +1 on |0⟩;
//! - σ_− = |0⟩⟨1| (lowering), σ_+ = |1⟩⟨0| (raising).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar shorthand used across the crate.
pub type C64 = Complex64;

/// A dense square complex matrix on a d-dimensional Hilbert space.
///
/// Invariants: the backing matrix is square with d ≥ 1.  Entries are
/// dimensionless unless stated otherwise by the containing model.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    /// Wraps a square matrix. Errors if the matrix is not square or empty.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                row: 0,
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    /// Builds an operator from row-major nested entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::NotSquare {
                    rows: d,
                    row: i,
                    cols: row.len(),
                });
            }
        }
        if d == 0 {
            return Err(Error::NotSquare { rows: 0, row: 0, cols: 0 });
        }
        Ok(Self {
            mat: DMatrix::from_fn(d, d, |i, j| rows[i][j]),
        })
    }

    /// Builds an operator from row-major interleaved [re, im] pairs,
    /// the layout used by the C ABI and the config format.
    pub fn from_interleaved_row_major(dim: usize, data: &[f64]) -> Result<Self> {
        if dim == 0 || data.len() != 2 * dim * dim {
            return Err(Error::LengthMismatch { len: data.len() / 2, dim });
        }
        Ok(Self {
            mat: DMatrix::from_fn(dim, dim, |i, j| {
                let k = 2 * (i * dim + j);
                C64::new(data[k], data[k + 1])
            }),
        })
    }

    /// Serializes to row-major interleaved [re, im] pairs.
    pub fn to_interleaved_row_major(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(2 * d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.mat[(i, j)];
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    /// The zero operator of dimension d.
    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    /// The identity operator of dimension d.
    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Borrow the backing matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Consume into the backing matrix.
    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    /// Matrix trace Tr A.
    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Frobenius norm ‖A‖_F = √Σ|a_ij|².
    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Frobenius distance ‖A − B‖_F (panics on dimension mismatch, like
    /// the arithmetic operators; use [`commutator`] etc. for checked ops).
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// Hermitian part (A + A†)/2 — numerical hygiene for stochastic stepping.
    pub fn hermitize(&self) -> Self {
        let mut m = self.mat.adjoint();
        m += &self.mat;
        m.scale_mut(0.5);
        Self { mat: m }
    }

    /// Absolute Hermiticity defect ‖A − A†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part of A.
    ///
    /// Intended for positivity checks of (approximately Hermitian) states;
    /// the input is hermitized first so rounding-level asymmetry cannot
    /// poison the eigensolve.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = self.hermitize();
        let eig = nalgebra::SymmetricEigen::new(herm.mat);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest |eigenvalue| of the Hermitian part (spectral bound).
    pub fn spectral_bound(&self) -> f64 {
        let herm = self.hermitize();
        let eig = nalgebra::SymmetricEigen::new(herm.mat);
        eig.eigenvalues.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    /// Scalar multiple s·A.
    pub fn scaled(&self, s: C64) -> Self {
        Self { mat: &self.mat * s }
    }

    /// Entry access A[(i, j)].
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }
}

impl std::ops::Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.mat[idx]
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator { mat: &self.mat $op &rhs.mat }
            }
        }
    };
}
impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl std::ops::Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, s: C64) -> Operator {
        self.scaled(s)
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, s: f64) -> Operator {
        self.scaled(C64::new(s, 0.0))
    }
}

impl std::ops::Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { mat: -&self.mat }
    }
}

/// Commutator [A, B] = AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims("commutator", a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// Anticommutator {A, B} = AB + BA.
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims("anticommutator", a, b)?;
    Ok(&(a * b) + &(b * a))
}

pub(crate) fn check_dims(context: &'static str, a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Names of the standard single-qubit operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// Raising operator σ_+ = |1⟩⟨0|.
    Plus,
    /// Lowering operator σ_− = |0⟩⟨1|.
    Minus,
    Id,
}

/// Standard single-qubit operators in the (|0⟩, |1⟩) basis with
/// σ_z = diag(+1, −1).
pub fn pauli(which: Pauli) -> Operator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let rows = match which {
        Pauli::X => [[z, one], [one, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[one, z], [z, -one]],
        Pauli::Minus => [[z, one], [z, z]],
        Pauli::Plus => [[z, z], [one, z]],
        Pauli::Id => [[one, z], [z, one]],
    };
    Operator::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2 is square")
}

/// Parses a Pauli name as used in config files ("sigma_z", "z", ...).
pub fn pauli_by_name(name: &str) -> Result<Operator> {
    let which = match name.trim().to_ascii_lowercase().as_str() {
        "x" | "sigma_x" | "sx" => Pauli::X,
        "y" | "sigma_y" | "sy" => Pauli::Y,
        "z" | "sigma_z" | "sz" => Pauli::Z,
        "plus" | "sigma_plus" | "sp" => Pauli::Plus,
        "minus" | "sigma_minus" | "sm" => Pauli::Minus,
        "id" | "identity" | "i" => Pauli::Id,
        _ => {
            return Err(Error::UnknownName {
                name: name.to_string(),
                expected: "x, y, z, plus, minus, id (optionally prefixed sigma_)",
            })
        }
    };
    Ok(pauli(which))
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// up to tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Default Hermiticity tolerance, relative to ‖ρ‖_F.
    pub const HERMITICITY_TOL: f64 = 1e-12;
    /// Default absolute unit-trace tolerance.
    pub const TRACE_TOL: f64 = 1e-10;
    /// Default positive-semidefiniteness tolerance (−psd_tol allowed).
    pub const PSD_TOL: f64 = 1e-9;

    /// Validates with the default tolerances.
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tolerances(op, Self::HERMITICITY_TOL, Self::TRACE_TOL, Self::PSD_TOL)
    }

    /// Validates with caller-chosen tolerances.
    ///
    /// `herm_tol` is relative to ‖ρ‖_F; `trace_tol` and `psd_tol` are
    /// absolute.  Stochastic stepping uses a relaxed `psd_tol = 1e-6`,
    /// finite-ensemble averages 1e-4.
    pub fn with_tolerances(
        op: Operator,
        herm_tol: f64,
        trace_tol: f64,
        psd_tol: f64,
    ) -> Result<Self> {
        let scale = op.frobenius_norm();
        let defect = op.hermiticity_defect();
        if defect > herm_tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { defect, tol: herm_tol * scale });
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::NonUnitTrace { trace: tr.re, tol: trace_tol });
        }
        let min_eig = op.min_eigenvalue();
        if min_eig < -psd_tol {
            return Err(Error::NotPositive { min_eigenvalue: min_eig, tol: psd_tol });
        }
        Ok(Self { op })
    }

    /// The maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let op = Operator::identity(dim).scaled(C64::new(1.0 / dim as f64, 0.0));
        Self { op }
    }

    /// The basis projector |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::RangeError {
                field: "basis index",
                value: k as f64,
                min: 0.0,
                max: (dim - 1) as f64,
            });
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Self { op: Operator::from_matrix(m).expect("square") })
    }

    /// Borrow the underlying operator.
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Consume into the underlying operator.
    pub fn into_operator(self) -> Operator {
        self.op
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Purity Tr ρ².
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = ‖ρ‖_F² for Hermitian ρ.
        let n = self.op.frobenius_norm();
        n * n
    }

    /// Expectation value Tr(Aρ); real part is the physical value for
    /// Hermitian A.
    pub fn expectation(&self, a: &Operator) -> Result<C64> {
        check_dims("expectation", a, &self.op)?;
        Ok((a.matrix() * self.op.matrix()).trace())
    }
}
