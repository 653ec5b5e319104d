// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Four-level negatively charged exciton (trion) in an in-plane magnetic field.
//!
//! Basis order is fixed: `↑, ↓` electron ground states, then `⇑, ⇓` trion
//! states. Circular selection rules couple `↑ ↔ ⇑` (σ+) and `↓ ↔ ⇓` (σ−).
//! The Hamiltonian is written in the frame rotating at the drive frequency.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_traits::Float;

use crate::qsys::ComplexMatrix;
use crate::units::BOHR_MAGNETON_GHZ_PER_T;
use crate::{Error, Result, C64};

/// Hilbert-space dimension of the trion model.
pub const DIM: usize = 4;

/// Above this Rabi frequency (in units of Γ) the drive is no longer weak.
pub const WEAK_DRIVE_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(usize)]
pub enum Level {
    SpinUp = 0,
    SpinDown = 1,
    TrionUp = 2,
    TrionDown = 3,
}

impl Level {
    pub const ALL: [Level; DIM] = [Level::SpinUp, Level::SpinDown, Level::TrionUp, Level::TrionDown];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::SpinUp => "↑",
            Level::SpinDown => "↓",
            Level::TrionUp => "⇑",
            Level::TrionDown => "⇓",
        }
    }

    pub fn is_ground(self) -> bool {
        matches!(self, Level::SpinUp | Level::SpinDown)
    }
}

/// How the inhomogeneous spin dephasing time enters the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinDephasing {
    /// Lindblad dephasing at `rate` (rad/ns) about the in-plane field axis.
    Markovian { rate: f64 },
    /// Frozen Gaussian Overhauser shift of the precession frequency `2ω_b`
    /// with standard deviation `sigma_oh` (rad/ns). Handled by ensemble averaging;
    /// contributes no Lindblad term.
    Quasistatic { sigma_oh: f64 },
}

impl SpinDephasing {
    pub fn markovian_rate(&self) -> f64 {
        match *self {
            SpinDephasing::Markovian { rate } => rate,
            SpinDephasing::Quasistatic { .. } => 0.0,
        }
    }
}

/// Model rates and frequencies, all in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrionParams {
    /// Total trion spontaneous emission rate Γ = 1/T₁.
    pub gamma: f64,
    /// Electron Zeeman half-splitting; the Larmor precession frequency is 2ω_b.
    pub omega_b: f64,
    /// In-plane hole Zeeman half-splitting.
    pub omega_h: f64,
    /// QD–laser detuning Δ = ω − ω_d.
    pub delta: f64,
    /// Rabi frequency of the H-polarized drive.
    pub omega_rabi: f64,
    /// Pure dephasing rate of the optical coherences.
    pub gamma_opt_deph: f64,
    pub spin_dephasing: SpinDephasing,
}

impl TrionParams {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma", self.gamma),
            ("omega_rabi", self.omega_rabi),
            ("gamma_opt_deph", self.gamma_opt_deph),
        ];
        for (name, v) in rates {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!("{name} must be a finite rate >= 0, got {v}")));
            }
        }
        for (name, v) in [("omega_b", self.omega_b), ("omega_h", self.omega_h), ("delta", self.delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!("{name} must be finite, got {v}")));
            }
        }
        match self.spin_dephasing {
            SpinDephasing::Markovian { rate } if !(rate >= 0.0) => {
                Err(Error::InvalidParameter(alloc::format!("spin dephasing rate must be >= 0, got {rate}")))
            }
            SpinDephasing::Quasistatic { sigma_oh } if !(sigma_oh >= 0.0) => {
                Err(Error::InvalidParameter(alloc::format!("Overhauser width must be >= 0, got {sigma_oh}")))
            }
            _ => Ok(()),
        }
    }

    /// `true` when Ω ≤ 0.3Γ. Logs a warning otherwise.
    pub fn check_weak_drive(&self) -> bool {
        let weak = self.omega_rabi <= WEAK_DRIVE_LIMIT * self.gamma;
        if !weak {
            log::warn!(
                "drive Ω = {:.3} rad/ns exceeds the weak-excitation limit 0.3Γ = {:.3} rad/ns",
                self.omega_rabi,
                WEAK_DRIVE_LIMIT * self.gamma
            );
        }
        weak
    }

    /// Larmor precession frequency 2ω_b.
    pub fn larmor(&self) -> f64 {
        2.0 * self.omega_b
    }

    /// Fastest rate in the model; sets integrator and grid resolution.
    pub fn max_rate(&self) -> f64 {
        [
            self.gamma,
            self.omega_rabi,
            self.delta.abs(),
            2.0 * self.omega_b.abs(),
            2.0 * self.omega_h.abs(),
            self.gamma_opt_deph,
            self.spin_dephasing.markovian_rate(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Intrinsic spin coherence time: 1/rate (Markovian) or the 1/e time
    /// √2/σ_OH of the Gaussian envelope (quasistatic). `None` if undamped.
    pub fn spin_coherence_time(&self) -> Option<f64> {
        match self.spin_dephasing {
            SpinDephasing::Markovian { rate } if rate > 0.0 => Some(1.0 / rate),
            SpinDephasing::Quasistatic { sigma_oh } if sigma_oh > 0.0 => Some(2.0.sqrt() / sigma_oh),
            _ => None,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

/// Laboratory-side inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs {
    /// Trion radiative lifetime, ns.
    pub t1: f64,
    /// In-plane magnetic field, tesla.
    pub b_field: f64,
    /// In-plane electron g-factor.
    pub g_b: f64,
    /// In-plane hole g-factor.
    pub g_h: f64,
    /// Drive power in units of the saturation power.
    pub p_over_psat: f64,
}

impl PhysicalInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("t1 must be > 0, got {}", self.t1)));
        }
        if !(self.b_field >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("b_field must be >= 0, got {}", self.b_field)));
        }
        if !(self.p_over_psat >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "p_over_psat must be >= 0, got {}",
                self.p_over_psat
            )));
        }
        Ok(())
    }
}

/// Values that replace the ones derived from [`PhysicalInputs`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamOverrides {
    /// Electron Larmor frequency 2ω_b (rad/ns), replacing g_b·μ_B·B/ħ.
    pub larmor: Option<f64>,
    /// Hole Larmor frequency 2ω_h (rad/ns).
    pub hole_larmor: Option<f64>,
    pub delta: Option<f64>,
    pub omega_rabi: Option<f64>,
    pub gamma_opt_deph: Option<f64>,
    pub spin_dephasing: Option<SpinDephasing>,
}

/// Full precession angular frequency 2ω_b = g μ_B B / ħ, in rad/ns.
pub fn larmor_splitting(g: f64, b_field: f64) -> f64 {
    2.0 * core::f64::consts::PI * g * BOHR_MAGNETON_GHZ_PER_T * b_field
}

/// Rabi frequency at saturation, Ω_sat = Γ/√2 (two-level excited population
/// reaches a quarter at P = P_sat).
pub fn saturation_rabi(gamma: f64) -> f64 {
    gamma * FRAC_1_SQRT_2
}

/// Maps laboratory inputs to model parameters.
///
/// Γ = 1/T₁, 2ω_b from the g-factor unless overridden, Ω = Ω_sat·√(P/P_sat).
/// Without an override the spin dephasing is Markovian with zero rate.
pub fn from_physical(inputs: &PhysicalInputs, overrides: &ParamOverrides) -> Result<TrionParams> {
    inputs.validate()?;
    let gamma = 1.0 / inputs.t1;
    let larmor = overrides.larmor.unwrap_or_else(|| larmor_splitting(inputs.g_b, inputs.b_field));
    let hole_larmor = overrides
        .hole_larmor
        .unwrap_or_else(|| larmor_splitting(inputs.g_h, inputs.b_field));
    let params = TrionParams {
        gamma,
        omega_b: larmor / 2.0,
        omega_h: hole_larmor / 2.0,
        delta: overrides.delta.unwrap_or(0.0),
        omega_rabi: overrides
            .omega_rabi
            .unwrap_or_else(|| saturation_rabi(gamma) * inputs.p_over_psat.sqrt()),
        gamma_opt_deph: overrides.gamma_opt_deph.unwrap_or(0.0),
        spin_dephasing: overrides.spin_dephasing.unwrap_or(SpinDephasing::Markovian { rate: 0.0 }),
    };
    params.validate()?;
    Ok(params)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn proj(i: Level, j: Level) -> ComplexMatrix {
    ComplexMatrix::ket_bra(DIM, i.index(), j.index())
}

use Level::*;

/// Rotating-frame Hamiltonian
/// `Δ(|⇑⟩⟨⇑| + |⇓⟩⟨⇓|) + ω_b σx(ground) + ω_h σx(trion) + (Ω/2)(|⇑⟩⟨↑| + |⇓⟩⟨↓| + h.c.)`.
pub fn build_hamiltonian(p: &TrionParams) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(DIM);
    let mut put = |a: Level, b: Level, v: f64| {
        let cur = h.get(a.index(), b.index());
        h.set(a.index(), b.index(), cur + re(v));
    };
    put(TrionUp, TrionUp, p.delta);
    put(TrionDown, TrionDown, p.delta);
    put(SpinUp, SpinDown, p.omega_b);
    put(SpinDown, SpinUp, p.omega_b);
    put(TrionUp, TrionDown, p.omega_h);
    put(TrionDown, TrionUp, p.omega_h);
    let half = p.omega_rabi / 2.0;
    put(TrionUp, SpinUp, half);
    put(SpinUp, TrionUp, half);
    put(TrionDown, SpinDown, half);
    put(SpinDown, TrionDown, half);
    h
}

/// Spin dephasing generator about the in-plane field axis, `|↑⟩⟨↓| + |↓⟩⟨↑|`.
pub fn spin_field_axis() -> ComplexMatrix {
    &proj(SpinUp, SpinDown) + &proj(SpinDown, SpinUp)
}

/// Collapse operators with zero-rate channels omitted:
/// `√Γ|↑⟩⟨⇑|`, `√Γ|↓⟩⟨⇓|`, `√(2γ_opt)(|⇑⟩⟨⇑| + |⇓⟩⟨⇓|)` and, for Markovian
/// spin dephasing, `√(γ_s/2)(|↑⟩⟨↓| + |↓⟩⟨↑|)`.
///
/// The spin dephasing acts about the in-plane (Voigt) field axis, the same
/// axis whose frequency fluctuates in the quasistatic Overhauser model, so the
/// transverse spin components decay as `e^{-γ_s t}` while precessing.
pub fn build_collapse_ops(p: &TrionParams) -> Vec<ComplexMatrix> {
    let mut ops = Vec::new();
    if p.gamma > 0.0 {
        let s = p.gamma.sqrt();
        ops.push(proj(SpinUp, TrionUp).scale_re(s));
        ops.push(proj(SpinDown, TrionDown).scale_re(s));
    }
    ops.extend(dephasing_ops(p));
    ops
}

/// The non-radiative collapse operators (optical and spin dephasing).
pub fn dephasing_ops(p: &TrionParams) -> Vec<ComplexMatrix> {
    let mut ops = Vec::new();
    if p.gamma_opt_deph > 0.0 {
        let trion = &proj(TrionUp, TrionUp) + &proj(TrionDown, TrionDown);
        ops.push(trion.scale_re((2.0 * p.gamma_opt_deph).sqrt()));
    }
    let rate = p.spin_dephasing.markovian_rate();
    if rate > 0.0 {
        ops.push(spin_field_axis().scale_re((rate / 2.0).sqrt()));
    }
    ops
}

/// Cross-polarized detection operator `E_V = √Γ(|↑⟩⟨⇑| − |↓⟩⟨⇓|)/√2`.
pub fn v_port_field_op(p: &TrionParams) -> ComplexMatrix {
    (&proj(SpinUp, TrionUp) - &proj(SpinDown, TrionDown)).scale_re((p.gamma / 2.0).sqrt())
}

/// Co-polarized detection operator `E_H = √Γ(|↑⟩⟨⇑| + |↓⟩⟨⇓|)/√2`.
pub fn h_port_field_op(p: &TrionParams) -> ComplexMatrix {
    (&proj(SpinUp, TrionUp) + &proj(SpinDown, TrionDown)).scale_re((p.gamma / 2.0).sqrt())
}

/// Hamiltonian, collapse operators and detected field of the `↑ ↔ ⇑`
/// two-level system obtained when the `↓` branch is decoupled.
#[derive(Debug, Clone)]
pub struct TwoLevelReduction {
    pub hamiltonian: ComplexMatrix,
    pub collapse_ops: Vec<ComplexMatrix>,
    pub field: ComplexMatrix,
}

/// Restricts the model to `{↑, ⇑}` (index 0 = ground, 1 = excited).
///
/// Spin terms are dropped. Optical pure dephasing is kept.
pub fn two_level_reduction(p: &TrionParams) -> TwoLevelReduction {
    let mut h = ComplexMatrix::zeros(2);
    h.set(1, 1, re(p.delta));
    h.set(0, 1, re(p.omega_rabi / 2.0));
    h.set(1, 0, re(p.omega_rabi / 2.0));
    let lower = ComplexMatrix::ket_bra(2, 0, 1);
    let mut collapse_ops = Vec::new();
    if p.gamma > 0.0 {
        collapse_ops.push(lower.scale_re(p.gamma.sqrt()));
    }
    if p.gamma_opt_deph > 0.0 {
        collapse_ops.push(ComplexMatrix::ket_bra(2, 1, 1).scale_re((2.0 * p.gamma_opt_deph).sqrt()));
    }
    TwoLevelReduction {
        hamiltonian: h,
        collapse_ops,
        field: lower.scale_re(p.gamma.sqrt()),
    }
}

/// Permutation `↑ ↔ ↓`, `⇑ ↔ ⇓` as a unitary matrix.
pub fn spin_exchange() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(DIM);
    for (a, b) in [(SpinUp, SpinDown), (SpinDown, SpinUp), (TrionUp, TrionDown), (TrionDown, TrionUp)] {
        u.set(a.index(), b.index(), re(1.0));
    }
    u
}
