// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{ComplexMatrix, Tolerances};
use crate::{Error, Result, C64};

/// A linear map on `dim × dim` matrices, stored as a `dim² × dim²` matrix
/// acting on column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    action: DMatrix<C64>,
}

impl Superoperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            action: DMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn from_action(dim: usize, action: DMatrix<C64>) -> Result<Self> {
        if action.nrows() != dim * dim || action.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: action.nrows(),
            });
        }
        Ok(Self { dim, action })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &DMatrix<C64> {
        &self.action
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(x.dim(), self.dim);
        let v = DVector::from_column_slice(x.as_inner().as_slice());
        let out = &self.action * v;
        ComplexMatrix::from_inner(DMatrix::from_column_slice(self.dim, self.dim, out.as_slice()))
    }

    /// Largest absolute row sum; an upper bound on every eigenvalue modulus.
    pub fn rate_bound(&self) -> f64 {
        self.action
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `Tr(L[X])` expressed as a row functional: the entries of `vec(𝟙)† L`.
    /// Zero for every trace-preserving generator.
    pub fn trace_functional(&self) -> Vec<C64> {
        let d = self.dim;
        (0..d * d)
            .map(|col| (0..d).map(|i| self.action[(i * d + i, col)]).sum())
            .collect()
    }
}

/// Builds the Lindblad generator
/// `L[ρ] = -i[H, ρ] + Σ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})`.
pub fn liouvillian(h: &ComplexMatrix, collapse_ops: &[ComplexMatrix]) -> Result<Superoperator> {
    liouvillian_with(h, collapse_ops, &Tolerances::DEFAULT)
}

pub fn liouvillian_with(
    h: &ComplexMatrix,
    collapse_ops: &[ComplexMatrix],
    tol: &Tolerances,
) -> Result<Superoperator> {
    let d = h.dim();
    for c in collapse_ops {
        if c.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
    }
    let defect = h.hermiticity_defect();
    if defect > tol.hermiticity {
        return Err(Error::NotHermitian { defect });
    }

    let id = DMatrix::<C64>::identity(d, d);
    let hm = h.as_inner();
    let minus_i = C64::new(0.0, -1.0);
    let mut action = (id.kronecker(hm) - hm.transpose().kronecker(&id)) * minus_i;
    let half = C64::new(0.5, 0.0);
    for c in collapse_ops {
        let l = c.as_inner();
        let ldl = l.adjoint() * l;
        action += l.conjugate().kronecker(l);
        action -= id.kronecker(&ldl) * half;
        action -= ldl.transpose().kronecker(&id) * half;
    }
    Ok(Superoperator { dim: d, action })
}
