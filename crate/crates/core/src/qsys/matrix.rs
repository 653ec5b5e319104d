// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_traits::{Float, Zero};

use crate::{Error, Result, C64};

/// A square complex matrix acting on a small Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self::from_fn(dim, |i, j| entries[i * dim + j]))
    }

    /// `|i⟩⟨j|` on a space of dimension `dim`.
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    /// `|ψ⟩⟨φ|` for arbitrary vectors.
    pub fn outer(psi: &[C64], phi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * phi[j].conj())
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "ComplexMatrix must be square");
        Self(m)
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `max |M - M†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> Vec<C64> {
        self.0.as_slice().to_vec()
    }

    pub fn from_vectorized(dim: usize, v: &[C64]) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: v.len(),
            });
        }
        Ok(Self(DMatrix::from_column_slice(dim, dim, v)))
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).fold(C64::zero(), |acc, j| acc + self.0[(i, j)] * psi[j]))
            .collect()
    }

    /// `⟨A⟩ = Tr(A ρ)`, computed without forming the product.
    pub fn expect(&self, rho: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = C64::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * rho.0[(j, i)];
            }
        }
        acc
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.hermitian_part().0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Eigen-decomposition of the Hermitian part: `(eigenvalue, eigenvector)` pairs.
    pub fn hermitian_eigen(&self) -> Vec<(f64, Vec<C64>)> {
        let eig = self.hermitian_part().0.symmetric_eigen();
        let n = self.dim();
        (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
            .collect()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Tolerance applied to trace, Hermiticity and positivity checks.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let m = ComplexMatrix::outer(psi, psi).scale_re(1.0 / norm);
        Ok(Self { matrix: m })
    }

    /// The projector onto basis state `k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self {
            matrix: ComplexMatrix::ket_bra(dim, k, k),
        }
    }

    /// The maximally mixed state.
    pub fn mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Validates the density-matrix invariants at [`Self::TOLERANCE`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Self::TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidParameter(alloc::format!("density matrix trace {tr} != 1")));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::InvalidParameter(alloc::format!(
                "density matrix not Hermitian (defect {defect:e})"
            )));
        }
        let min_ev = matrix.hermitian_eigenvalues()[0];
        if min_ev < -tol {
            return Err(Error::InvalidParameter(alloc::format!(
                "density matrix has negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by trusted evolution code without re-checking.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix.get(k, k).re
    }

    pub fn expect(&self, op: &ComplexMatrix) -> C64 {
        op.expect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues()[0]
    }
}
