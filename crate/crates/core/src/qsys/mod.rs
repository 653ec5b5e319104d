// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for small open quantum systems.
//!
//! Density matrices are vectorized by stacking columns (column-major order),
//! so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Every superoperator in the crate
//! uses this convention.

mod evolve;
mod matrix;
mod superop;

pub use evolve::{expm, propagate, propagate_with, steady_state, steady_state_with, Propagator};
pub use matrix::{ComplexMatrix, DensityMatrix};
pub use superop::{liouvillian, liouvillian_with, Superoperator};

/// Numerical tolerances used by the open-system routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest accepted `max|H - H†|`.
    pub hermiticity: f64,
    /// Integrator step as a fraction of the inverse fastest rate of the generator.
    pub step_fraction: f64,
    /// Relative singular-value threshold below which a direction counts as null.
    pub null_space: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-9,
        step_fraction: 0.01,
        null_space: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
