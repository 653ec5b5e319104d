// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation core for resonant light scattering from a driven quantum-dot
//! electron spin in a micropillar cavity.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs: file formats, configuration, threading and the command line
//! live in the companion `spinmod` crate.
//!
//! Layout:
//!
//! * [`qsys`]: dense operators, Lindblad superoperators, propagation and
//!   steady states for Hilbert spaces of dimension ≤ 16.
//! * [`trion`]: the four-level charged-exciton model in a Voigt field.
//! * [`scatter`]: closed-form weak-excitation cavity reflection.
//! * [`dynamics`]: two-time correlations, homodyne mixing, visibility and
//!   emission spectra.
//! * [`ensemble`]: quasi-static averaging and detector timing response.
//! * [`trajectories`]: quantum-jump unraveling and a coincidence correlator.
//! * [`analysis`]: fitting helpers used to read frequencies, envelopes and
//!   peak positions off simulated curves.
//!
//! Units are fixed throughout: times in ns, rates and frequencies in rad/ns.

#![no_std]
#![warn(missing_debug_implementations)]
// `num_traits::Float` supplies float math on toolchains whose `core` lacks
// it. Where `core` (or std, in tests) has inherent methods they shadow it.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod fft;
pub mod presets;
pub mod qsys;
pub mod quadrature;
pub mod scatter;
pub mod trajectories;
pub mod trion;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
