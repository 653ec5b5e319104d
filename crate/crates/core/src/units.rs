// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Unit conversions at the boundary between laboratory and internal units.
//!
//! Internally every time is in ns and every rate or frequency in rad/ns.

use core::f64::consts::{LN_2, PI};

use num_traits::Float;

/// Bohr magneton over Planck's constant, GHz per tesla.
pub const BOHR_MAGNETON_GHZ_PER_T: f64 = 13.996_244_936;

/// Angular frequency (rad/ns) corresponding to an energy of 1 µeV.
pub const RAD_PER_NS_PER_UEV: f64 = 1.519_267_447;

pub fn ghz_to_rad_per_ns(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

pub fn mhz_to_rad_per_ns(f_mhz: f64) -> f64 {
    ghz_to_rad_per_ns(f_mhz * 1e-3)
}

pub fn rad_per_ns_to_ghz(w: f64) -> f64 {
    w / (2.0 * PI)
}

pub fn rad_per_ns_to_mhz(w: f64) -> f64 {
    rad_per_ns_to_ghz(w) * 1e3
}

pub fn uev_to_rad_per_ns(e_uev: f64) -> f64 {
    e_uev * RAD_PER_NS_PER_UEV
}

/// Standard deviation of a Gaussian with the given full width at half maximum.
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (2.0 * (2.0 * LN_2).sqrt())
}
