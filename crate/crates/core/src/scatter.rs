// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Weak-excitation reflection from a single-sided cavity with a coupled dot.
//!
//! Reflection follows the input–output form
//! `r = 1 − 2κ_ext / (κ + 2iδ_c + 4g²/(γ_x + 2iΔ))`. The empty-cavity phase is
//! removed as a global phase: [`ScatterCoefficients::r_c`] is real and
//! positive and `phi_d` is the QD-induced phase relative to it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Total cavity decay κ, rad/ns.
    pub kappa: f64,
    /// Top-mirror coupling κ_ext ≤ κ, rad/ns.
    pub kappa_ext: f64,
    /// QD–cavity coupling g, rad/ns.
    pub g_coupling: f64,
    /// Total transition linewidth γ_x, rad/ns.
    pub gamma_x: f64,
    /// Cavity–laser detuning δ_c, rad/ns.
    pub delta_c: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kappa >= 0.0
            && self.g_coupling >= 0.0
            && self.gamma_x >= 0.0
            && (0.0..=self.kappa).contains(&self.kappa_ext)
            && self.delta_c.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(alloc::format!(
                "cavity needs rates >= 0 and 0 <= kappa_ext <= kappa: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Purcell-enhanced fraction of emission into the cavity mode,
/// `β = F/(F + 1)` with `F = 4g²/(κγ_x)`.
pub fn beta_factor(c: &CavityParams) -> Result<f64> {
    c.validate()?;
    if c.g_coupling == 0.0 {
        return Ok(0.0);
    }
    let denom = c.kappa * c.gamma_x;
    if denom == 0.0 {
        return Err(Error::InvalidParameter("beta factor undefined for kappa·gamma_x = 0 with g > 0".into()));
    }
    let f = 4.0 * c.g_coupling * c.g_coupling / denom;
    Ok(f / (f + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoefficients {
    /// Empty-cavity reflection magnitude.
    pub r_c: f64,
    /// QD-coupled reflection magnitude.
    pub r_d: f64,
    /// Phase of the QD-coupled reflection relative to the empty cavity.
    pub phi_d: f64,
}

impl ScatterCoefficients {
    /// `r_d e^{iφ_d}`.
    pub fn r_qd(&self) -> C64 {
        C64::from_polar(self.r_d, self.phi_d)
    }
}

fn raw_reflections(c: &CavityParams, delta: f64) -> Result<(C64, C64)> {
    c.validate()?;
    let cavity = C64::new(c.kappa, 2.0 * c.delta_c);
    if cavity.norm() == 0.0 {
        return Err(Error::InvalidParameter("cavity with zero decay and detuning has no reflection".into()));
    }
    let r_c = C64::new(1.0, 0.0) - C64::new(2.0 * c.kappa_ext, 0.0) / cavity;
    let dot = C64::new(c.gamma_x, 2.0 * delta);
    let g2 = 4.0 * c.g_coupling * c.g_coupling;
    let r_qd = if g2 == 0.0 {
        r_c
    } else {
        if dot.norm() == 0.0 {
            return Err(Error::InvalidParameter("dot with zero linewidth and detuning".into()));
        }
        let denom = cavity + C64::new(g2, 0.0) / dot;
        C64::new(1.0, 0.0) - C64::new(2.0 * c.kappa_ext, 0.0) / denom
    };
    Ok((r_c, r_qd))
}

/// Empty and QD-coupled reflection at QD–laser detuning `delta`.
pub fn reflection_coefficients(c: &CavityParams, delta: f64) -> Result<ScatterCoefficients> {
    let (r_c, r_qd) = raw_reflections(c, delta)?;
    let phi = if r_c.norm() > 0.0 { r_qd.arg() - r_c.arg() } else { r_qd.arg() };
    Ok(ScatterCoefficients {
        r_c: r_c.norm(),
        r_d: r_qd.norm(),
        phi_d: wrap_phase(phi),
    })
}

/// Maps a phase to `(−π, π]`.
fn wrap_phase(phi: f64) -> f64 {
    let mut x = phi % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub a: C64,
    pub b: C64,
}

impl SpinState {
    pub const UP: SpinState = SpinState {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.0, 0.0),
    };
    pub const DOWN: SpinState = SpinState {
        a: C64::new(0.0, 0.0),
        b: C64::new(1.0, 0.0),
    };

    pub fn new(a: C64, b: C64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(alloc::format!("spin state norm² is {n}, expected 1")));
        }
        Ok(Self { a, b })
    }
}

/// Amplitudes of the cross-polarized output `t[a|↑⟩ − b|↓⟩]|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossOutput {
    pub amp_up: C64,
    pub amp_down: C64,
    /// Probability of a V-polarized output photon, `|t|²`.
    pub norm: f64,
}

/// `t = (r_c − r_d e^{iφ_d})/2`, `amp_up = t·a`, `amp_down = −t·b`.
pub fn cross_amplitude(s: &SpinState, sc: &ScatterCoefficients) -> CrossOutput {
    let t = (C64::new(sc.r_c, 0.0) - sc.r_qd()) * 0.5;
    CrossOutput {
        amp_up: t * s.a,
        amp_down: -t * s.b,
        norm: t.norm_sqr() * (s.a.norm_sqr() + s.b.norm_sqr()),
    }
}

/// Stokes vector `(S₁, S₂, S₃)` of the reflected field for an H-polarized
/// input, normalized by the total reflected intensity.
///
/// The spin-up state adds the QD response to the σ+ component and the
/// spin-down state to σ−; `σ± = (H ± iV)/√2`. The two spin branches differ
/// by the sign of the V amplitude, so their trajectories are related by
/// `(S₁, S₂, S₃) → (S₁, −S₂, −S₃)`. An all-zero vector is returned if nothing
/// is reflected.
pub fn poincare_trajectory(c: &CavityParams, delta_sweep: &[f64], spin_up: bool) -> Result<Vec<[f64; 3]>> {
    delta_sweep
        .iter()
        .map(|&d| {
            let (r_c, r_qd) = raw_reflections(c, d)?;
            let (r_plus, r_minus) = if spin_up { (r_qd, r_c) } else { (r_c, r_qd) };
            // H = (σ+ + σ−)/√2 reflects to (r+ σ+ + r− σ−)/√2.
            let h = (r_plus + r_minus) * 0.5;
            let v = (r_plus - r_minus) * C64::new(0.0, -0.5);
            Ok(stokes(h, v))
        })
        .collect()
}

/// Normalized Stokes parameters of the Jones vector `(E_H, E_V)`:
/// S₁ = H−V, S₂ = diagonal−antidiagonal, S₃ = σ+ − σ−.
fn stokes(h: C64, v: C64) -> [f64; 3] {
    let s0 = h.norm_sqr() + v.norm_sqr();
    if s0 == 0.0 {
        return [0.0; 3];
    }
    let cross = h.conj() * v;
    [
        (h.norm_sqr() - v.norm_sqr()) / s0,
        2.0 * cross.re / s0,
        -2.0 * cross.im / s0,
    ]
}
