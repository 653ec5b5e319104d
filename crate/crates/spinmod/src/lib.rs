// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner for the spin-photon scattering simulator: configuration,
//! presets, the scenario pipelines and result files. The physics lives in
//! [`spinmod_core`].

pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod scenarios;
pub mod tagfile;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use output::ResultTable;
pub use spinmod_core as core;
