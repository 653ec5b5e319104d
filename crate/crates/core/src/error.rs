// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hamiltonian is not Hermitian (max |H - H^dag| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("negative evolution time {0} ns")]
    NegativeTime(f64),

    #[error("steady state is not unique: null space has dimension {multiplicity} (decoupled sectors)")]
    DegenerateSteadyState { multiplicity: usize },

    #[error("steady state could not be normalized (trace {0:e})")]
    SteadyStateTrace(f64),

    #[error("no scattered field: steady-state detected intensity is {0:e}")]
    NoScatteredField(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid step {step} ns is too coarse; at most {max_step} ns is required")]
    GridTooCoarse { step: f64, max_step: f64 },

    #[error("correlation window {have} ns is too short; at least {required} ns is required")]
    InsufficientTauMax { have: f64, required: f64 },

    #[error("{n} quadrature samples are too few for this width; at least {required} required")]
    TooFewSamples { n: usize, required: usize },

    #[error("Markovian spin dephasing must be zero when averaging over the Overhauser field")]
    DoubleCountedDephasing,

    #[error("series of kind {found} given where {expected} is required")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("time-tag channel {0} is empty")]
    EmptyChannel(char),

    #[error("reflection coefficient is singular: all rates and detunings are zero")]
    SingularReflection,

    #[error("fit did not converge: {0}")]
    FitFailed(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
