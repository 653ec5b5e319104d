// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Quasi-static ensembles and detector response.
//!
//! Noise parameters are frozen during a scattering event and Gaussian across
//! the acquisition. Averages use Gauss–Hermite quadrature, are taken over
//! unnormalized correlations, and are normalized afterwards by the averaged
//! intensity.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dynamics::{spectrum, CorrelationKind, CorrelationSeries, HomodyneConfig, ScatteringModel, SpectrumSeries, TauGrid};
use crate::quadrature::GaussHermite;
use crate::trion::{SpinDephasing, TrionParams};
use crate::units::fwhm_to_sigma;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterKind {
    /// Spectral jitter of the QD–laser detuning Δ.
    GaussianDetuning,
    /// Overhauser jitter of the Larmor frequency 2ω_b.
    GaussianOverhauser,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterModel {
    pub kind: JitterKind,
    /// Full width at half maximum of the jittered frequency, rad/ns.
    pub fwhm: f64,
    /// Number of quadrature nodes.
    pub n_samples: usize,
}

impl JitterModel {
    pub const DEFAULT_SAMPLES: usize = 21;

    pub fn new(kind: JitterKind, fwhm: f64, n_samples: usize) -> Result<Self> {
        let j = Self { kind, fwhm, n_samples };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm >= 0.0) || !self.fwhm.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("jitter fwhm must be >= 0, got {}", self.fwhm)));
        }
        if self.n_samples < 3 {
            return Err(Error::TooFewSamples {
                n: self.n_samples,
                required: 3,
            });
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        fwhm_to_sigma(self.fwhm)
    }

    /// Offsets and probability weights of the quadrature nodes.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        GaussHermite::new(self.n_samples).points(0.0, self.sigma()).collect()
    }
}

/// Timing response and efficiency of the single-photon detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// Standard deviation of one detector's Gaussian timing response, ns.
    pub jitter_sigma: f64,
    pub efficiency: f64,
    /// Histogram bin width, ns.
    pub bin_width: f64,
}

impl DetectorModel {
    pub const IDEAL: DetectorModel = DetectorModel {
        jitter_sigma: 0.0,
        efficiency: 1.0,
        bin_width: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma >= 0.0) || !(0.0..=1.0).contains(&self.efficiency) || !(self.bin_width >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "detector needs jitter >= 0, efficiency in [0, 1], bin >= 0 (got {}, {}, {})",
                self.jitter_sigma,
                self.efficiency,
                self.bin_width
            )));
        }
        Ok(())
    }
}

/// Which quantity an ensemble average is taken of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    G1,
    G2,
    G2Hom(HomodyneConfig),
    /// Emission spectrum from the averaged G1; the τ window must reach
    /// `min_tau_max`.
    Spectrum { min_tau_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleOutput {
    /// Normalized correlation (`g1`, `g2` or `g2_hom`).
    Correlation(CorrelationSeries),
    Spectrum(SpectrumSeries),
}

impl EnsembleOutput {
    pub fn correlation(self) -> Result<CorrelationSeries> {
        match self {
            EnsembleOutput::Correlation(c) => Ok(c),
            EnsembleOutput::Spectrum(_) => Err(Error::WrongKind {
                expected: "correlation",
                found: "spectrum",
            }),
        }
    }

    pub fn spectrum(self) -> Result<SpectrumSeries> {
        match self {
            EnsembleOutput::Spectrum(s) => Ok(s),
            EnsembleOutput::Correlation(c) => Err(Error::WrongKind {
                expected: "spectrum",
                found: c.kind.name(),
            }),
        }
    }
}

/// One ensemble member's unnormalized correlation and mean intensity.
fn member(p: &TrionParams, obs: &Observable, grid: &TauGrid) -> Result<(CorrelationSeries, f64)> {
    let model = ScatteringModel::new(p)?;
    match obs {
        Observable::G1 | Observable::Spectrum { .. } => {
            let s = model.raw_g1(grid)?;
            let i = s.normalization;
            Ok((s, i))
        }
        Observable::G2 => {
            let s = model.raw_g2(grid)?;
            let i = s.normalization.sqrt();
            Ok((s, i))
        }
        Observable::G2Hom(h) => {
            let s = model.raw_g2_hom(grid, h)?;
            let i = s.normalization.sqrt();
            Ok((s, i))
        }
    }
}

fn finish(obs: &Observable, mut raw: CorrelationSeries, intensity: f64) -> Result<EnsembleOutput> {
    raw.normalization = match raw.kind {
        CorrelationKind::RawG1 => intensity,
        _ => intensity * intensity,
    };
    match obs {
        Observable::Spectrum { min_tau_max } => Ok(EnsembleOutput::Spectrum(spectrum(&raw, *min_tau_max)?)),
        _ => {
            if !(intensity > 1e-24) {
                return Err(Error::NoScatteredField(intensity));
            }
            Ok(EnsembleOutput::Correlation(raw.normalize()?))
        }
    }
}

fn weighted_average(
    members: impl Iterator<Item = (TrionParams, f64)>,
    obs: &Observable,
    grid: &TauGrid,
) -> Result<EnsembleOutput> {
    let mut acc: Option<CorrelationSeries> = None;
    let mut intensity = 0.0;
    for (p, w) in members {
        let (s, i) = member(&p, obs, grid)?;
        intensity += w * i;
        match acc.as_mut() {
            None => {
                let mut first = s;
                for v in first.values.iter_mut() {
                    *v *= w;
                }
                acc = Some(first);
            }
            Some(a) => {
                for (x, y) in a.values.iter_mut().zip(&s.values) {
                    *x += y * w;
                }
            }
        }
    }
    let raw = acc.ok_or(Error::TooFewSamples { n: 0, required: 1 })?;
    finish(obs, raw, intensity)
}

/// Average over Gaussian spectral jitter of Δ around `p.delta`.
///
/// Requires `n_samples ≥ 8·fwhm/Γ`.
pub fn average_over_detuning(p: &TrionParams, j: &JitterModel, obs: &Observable, grid: &TauGrid) -> Result<EnsembleOutput> {
    j.validate()?;
    if j.kind != JitterKind::GaussianDetuning {
        return Err(Error::WrongKind {
            expected: "gaussian_detuning",
            found: "gaussian_overhauser",
        });
    }
    grid.check(p)?;
    if j.fwhm == 0.0 {
        return weighted_average(core::iter::once((*p, 1.0)), obs, grid);
    }
    let required = (8.0 * j.fwhm / p.gamma).ceil() as usize;
    if j.n_samples < required {
        return Err(Error::TooFewSamples {
            n: j.n_samples,
            required,
        });
    }
    let members = j.nodes().into_iter().map(|(d, w)| (p.with_delta(p.delta + d), w));
    weighted_average(members, obs, grid)
}

/// Average over a frozen Gaussian Overhauser shift of the Larmor frequency.
///
/// The jitter width applies to the precession frequency 2ω_b, so each member
/// has `ω_b + δ/2`. Markovian spin dephasing must be off.
pub fn average_over_overhauser(p: &TrionParams, j: &JitterModel, obs: &Observable, grid: &TauGrid) -> Result<EnsembleOutput> {
    j.validate()?;
    if j.kind != JitterKind::GaussianOverhauser {
        return Err(Error::WrongKind {
            expected: "gaussian_overhauser",
            found: "gaussian_detuning",
        });
    }
    if p.spin_dephasing.markovian_rate() > 0.0 {
        return Err(Error::DoubleCountedDephasing);
    }
    let base = TrionParams {
        spin_dephasing: SpinDephasing::Quasistatic { sigma_oh: j.sigma() },
        ..*p
    };
    grid.check(&base)?;
    if j.fwhm == 0.0 {
        return weighted_average(core::iter::once((base, 1.0)), obs, grid);
    }
    let members = j.nodes().into_iter().map(|(d, w)| {
        (
            TrionParams {
                omega_b: base.omega_b + d / 2.0,
                ..base
            },
            w,
        )
    });
    weighted_average(members, obs, grid)
}

/// Convolves a correlation with the two-detector timing response, a
/// unit-area Gaussian of standard deviation `√2·jitter_sigma`.
///
/// Negative delays are filled by symmetry (`G(−τ) = G(τ)*`) and delays past
/// the grid by the last value.
pub fn convolve_detector_jitter(series: &CorrelationSeries, d: &DetectorModel) -> Result<CorrelationSeries> {
    d.validate()?;
    if d.jitter_sigma == 0.0 {
        return Ok(series.clone());
    }
    let h = series.grid.step();
    let max_step = d.jitter_sigma / 2.0;
    if h > max_step {
        return Err(Error::GridTooCoarse { step: h, max_step });
    }
    let sigma = core::f64::consts::SQRT_2 * d.jitter_sigma;
    let half = (6.0 * sigma / h).ceil() as i64;
    let kernel: Vec<f64> = (-half..=half)
        .map(|m| {
            let x = m as f64 * h / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let norm: f64 = kernel.iter().sum();
    let n = series.values.len() as i64;
    let at = |k: i64| -> C64 {
        if k < 0 {
            series.values[(-k).min(n - 1) as usize].conj()
        } else {
            series.values[k.min(n - 1) as usize]
        }
    };
    let values = (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for (m, w) in (-half..=half).zip(&kernel) {
                acc += at(i - m) * *w;
            }
            acc / norm
        })
        .collect();
    Ok(CorrelationSeries {
        values,
        ..series.clone()
    })
}

/// Emission spectra for a list of detunings on a common frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningScan {
    pub deltas: Vec<f64>,
    pub spectra: Vec<SpectrumSeries>,
    /// Steady-state V-port intensity ⟨E_V†E_V⟩ per detuning, 1/ns.
    pub intensities: Vec<f64>,
}

pub fn detuning_scan(p: &TrionParams, deltas: &[f64], grid: &TauGrid, min_tau_max: f64) -> Result<DetuningScan> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("detuning scan needs at least one detuning".into()));
    }
    let mut spectra = Vec::with_capacity(deltas.len());
    let mut intensities = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let q = p.with_delta(d);
        grid.check(&q)?;
        let model = ScatteringModel::new(&q)?;
        let raw = model.raw_g1(grid)?;
        intensities.push(model.intensity());
        spectra.push(spectrum(&raw, min_tau_max)?);
    }
    Ok(DetuningScan {
        deltas: deltas.to_vec(),
        spectra,
        intensities,
    })
}
