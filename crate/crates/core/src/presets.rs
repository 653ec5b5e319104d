// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Measured device parameters for the two quantum dots, and the spectrum
//! demonstration settings.
//!
//! Presets carry the fitted Larmor frequencies directly rather than deriving
//! them from g-factor and field. The quoted T₂* is the decay time of the
//! measured coherence envelope, which also contains dephasing by the probe
//! itself; [`calibrate_spin_dephasing`] removes that part so the simulated
//! envelope reproduces the measured time.

use crate::qsys::liouvillian;
use crate::ensemble::DetectorModel;
use crate::trion::{build_collapse_ops, build_hamiltonian, from_physical, ParamOverrides, PhysicalInputs, SpinDephasing, TrionParams};
use crate::units::mhz_to_rad_per_ns;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub physical: PhysicalInputs,
    /// Larmor frequency 2ω_b/2π, MHz.
    pub larmor_mhz: f64,
    /// Measured envelope decay time of the spin coherence, ns.
    pub t2_star: f64,
    /// Optical pure dephasing in units of Γ.
    pub gamma_opt_deph_over_gamma: f64,
    pub detector: DetectorModel,
    /// Local-oscillator to scattered-field intensity ratio for homodyne runs.
    pub lo_ratio: f64,
    /// FWHM of the spectral jitter, µeV.
    pub spectral_jitter_uev: f64,
    /// Interferometer visibility at zero delay.
    pub v0: f64,
}

/// Dot used for the interferometer and HBT measurements.
pub const QD1: Preset = Preset {
    name: "qd1",
    physical: PhysicalInputs {
        t1: 0.46,
        b_field: 0.108,
        g_b: 0.437,
        g_h: 0.0,
        p_over_psat: 0.02,
    },
    larmor_mhz: 590.0,
    t2_star: 2.7,
    gamma_opt_deph_over_gamma: 0.0,
    detector: DetectorModel {
        jitter_sigma: 0.064,
        efficiency: 1.0,
        bin_width: 0.032,
    },
    lo_ratio: 10.0,
    spectral_jitter_uev: 5.0,
    v0: 0.85,
};

/// Dot used for the phase-locked homodyne measurements.
pub const QD2: Preset = Preset {
    name: "qd2",
    physical: PhysicalInputs {
        t1: 0.46,
        b_field: 0.086,
        g_b: 0.437,
        g_h: 0.0,
        p_over_psat: 0.1,
    },
    larmor_mhz: 159.0,
    t2_star: 12.5,
    gamma_opt_deph_over_gamma: 0.0,
    detector: DetectorModel {
        jitter_sigma: 0.3,
        efficiency: 1.0,
        bin_width: 0.256,
    },
    lo_ratio: 10.0,
    spectral_jitter_uev: 5.0,
    v0: 0.85,
};

/// QD1 with the Larmor frequency lowered to 2ω_b = 0.3Γ, so the two spectral
/// sidebands sit 0.6Γ apart.
pub const SPECTRUM: Preset = Preset {
    name: "spectrum",
    larmor_mhz: 0.3 / 0.46 / (2.0 * core::f64::consts::PI) * 1000.0,
    ..QD1
};

impl Preset {
    pub fn by_name(name: &str) -> Option<Preset> {
        match name {
            "qd1" => Some(QD1),
            "qd2" => Some(QD2),
            "spectrum" => Some(SPECTRUM),
            _ => None,
        }
    }

    /// Model parameters with the spin dephasing calibrated to `t2_star`.
    pub fn params(&self) -> Result<TrionParams> {
        let p = self.uncalibrated()?;
        let rate = calibrate_spin_dephasing(&p, self.t2_star)?;
        Ok(TrionParams {
            spin_dephasing: SpinDephasing::Markovian { rate },
            ..p
        })
    }

    /// Model parameters with spin dephasing rate `1/t2_star`.
    pub fn uncalibrated(&self) -> Result<TrionParams> {
        let gamma = 1.0 / self.physical.t1;
        let overrides = ParamOverrides {
            larmor: Some(mhz_to_rad_per_ns(self.larmor_mhz)),
            gamma_opt_deph: Some(self.gamma_opt_deph_over_gamma * gamma),
            spin_dephasing: Some(SpinDephasing::Markovian { rate: 1.0 / self.t2_star }),
            ..ParamOverrides::default()
        };
        from_physical(&self.physical, &overrides)
    }
}

/// Decay rate of the spin-precession envelope: `−Re λ` of the slowest
/// generator eigenmode oscillating at least at ω_b (half the Larmor
/// frequency). `None` without a magnetic field.
pub fn precession_decay_rate(p: &TrionParams) -> Result<Option<f64>> {
    if p.omega_b == 0.0 {
        return Ok(None);
    }
    let generator = liouvillian(&build_hamiltonian(p), &build_collapse_ops(p))?;
    let eig = generator
        .action()
        .clone()
        .schur()
        .eigenvalues()
        .ok_or(Error::FitFailed("generator eigenvalues"))?;
    let threshold = p.omega_b.abs();
    Ok(eig
        .iter()
        .filter(|l| l.im.abs() >= threshold)
        .map(|l| -l.re)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r)))))
}

/// Intrinsic spin dephasing rate for which the precession envelope decays
/// in `t2_star`, found by bisection on [`precession_decay_rate`].
///
/// The measured envelope includes dephasing by the probe: each scattered
/// photon reveals the spin along the optical axis. Without a field the rate
/// is `1/t2_star` unchanged.
pub fn calibrate_spin_dephasing(p: &TrionParams, t2_star: f64) -> Result<f64> {
    if !(t2_star > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("t2_star must be > 0, got {t2_star}")));
    }
    let target = 1.0 / t2_star;
    let envelope = |rate: f64| -> Result<Option<f64>> {
        precession_decay_rate(&TrionParams {
            spin_dephasing: SpinDephasing::Markovian { rate },
            ..*p
        })
    };
    let floor = match envelope(0.0)? {
        None => return Ok(target),
        Some(r) => r,
    };
    if floor >= target {
        return Err(Error::InvalidParameter(alloc::format!(
            "T2* = {t2_star} ns is shorter than the optical pumping limit {:.3} ns",
            1.0 / floor
        )));
    }
    let (mut lo, mut hi) = (0.0, target);
    while envelope(hi)?.unwrap_or(0.0) < target {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if envelope(mid)?.unwrap_or(0.0) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
