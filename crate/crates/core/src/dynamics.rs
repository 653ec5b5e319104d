// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-time correlations of the scattered field.
//!
//! Correlations follow the quantum regression theorem: an operator-modified
//! steady state is propagated with the same generator as the density matrix,
//! `⟨A(τ) B(0)⟩ = Tr[A e^{Lτ}(B ρ_ss)]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use num_traits::Float;

use crate::fft::fft_in_place;
use crate::qsys::{liouvillian_with, steady_state_with, ComplexMatrix, DensityMatrix, Propagator, Superoperator, Tolerances};
use crate::quadrature::GaussHermite;
use crate::trion::{self, TrionParams};
use crate::{Error, Result, C64};

/// Phase of the resonantly scattered amplitude relative to the drive.
///
/// The local-oscillator phase φ_LO is measured from this reference, so that
/// φ_LO = 0 selects the quadrature carrying the spin-conditioned sign.
pub const LO_REFERENCE_PHASE: f64 = -FRAC_PI_2;

/// Number of Gauss–Hermite nodes used to average over LO phase noise.
pub const PHASE_NOISE_NODES: usize = 15;

/// Uniform τ grid starting at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    step: f64,
    len: usize,
}

impl TauGrid {
    /// Default number of grid points.
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(tau_max: f64, len: usize) -> Result<Self> {
        if len < 2 || !(tau_max > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "tau grid needs tau_max > 0 and at least 2 points (got {tau_max}, {len})"
            )));
        }
        Ok(Self {
            step: tau_max / (len - 1) as f64,
            len,
        })
    }

    pub fn with_step(step: f64, len: usize) -> Result<Self> {
        if len < 2 || !(step > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("invalid tau grid ({step}, {len})")));
        }
        Ok(Self { step, len })
    }

    /// Largest admissible step for `p`: `0.05·min(1/Γ, π/(2ω_b))`.
    pub fn max_step_for(p: &TrionParams) -> f64 {
        let mut s = if p.gamma > 0.0 { 1.0 / p.gamma } else { f64::INFINITY };
        if p.omega_b.abs() > 0.0 {
            s = s.min(PI / (2.0 * p.omega_b.abs()));
        }
        0.05 * s
    }

    /// Default grid: `τ_max = 8·max(T_spin, 5/Γ)` with at least 4096 points and
    /// enough points to satisfy [`Self::max_step_for`].
    pub fn default_for(p: &TrionParams) -> Self {
        let fallback = if p.gamma > 0.0 { 10.0 / p.gamma } else { 10.0 };
        let t_spin = p.spin_coherence_time().unwrap_or(fallback);
        let tau_max = 8.0 * t_spin.max(5.0 / p.gamma.max(1e-12));
        Self::covering(p, tau_max, Self::DEFAULT_POINTS)
    }

    /// A grid reaching `tau_max` with at least `min_points` points and a step
    /// no coarser than [`Self::max_step_for`].
    pub fn covering(p: &TrionParams, tau_max: f64, min_points: usize) -> Self {
        let needed = (tau_max / Self::max_step_for(p)).ceil() as usize + 1;
        let len = needed.max(min_points).max(2);
        Self {
            step: tau_max / (len - 1) as f64,
            len,
        }
    }

    pub fn check(&self, p: &TrionParams) -> Result<()> {
        let max_step = Self::max_step_for(p);
        if self.step > max_step * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse {
                step: self.step,
                max_step,
            });
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.step * i as f64
    }

    pub fn tau_max(&self) -> f64 {
        self.tau(self.len - 1)
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.tau(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    G1,
    G2,
    G2Hom,
    RawG1,
    RawG2,
    RawG2Hom,
}

impl CorrelationKind {
    pub fn name(self) -> &'static str {
        match self {
            CorrelationKind::G1 => "g1",
            CorrelationKind::G2 => "g2",
            CorrelationKind::G2Hom => "g2_hom",
            CorrelationKind::RawG1 => "raw_G1",
            CorrelationKind::RawG2 => "raw_G2",
            CorrelationKind::RawG2Hom => "raw_G2_hom",
        }
    }

    pub fn is_raw(self) -> bool {
        matches!(self, CorrelationKind::RawG1 | CorrelationKind::RawG2 | CorrelationKind::RawG2Hom)
    }

    fn normalized(self) -> Self {
        match self {
            CorrelationKind::RawG1 => CorrelationKind::G1,
            CorrelationKind::RawG2 => CorrelationKind::G2,
            CorrelationKind::RawG2Hom => CorrelationKind::G2Hom,
            k => k,
        }
    }
}

/// Correlation values on a τ grid.
///
/// Raw series carry unnormalized values; `normalization` is the scalar they
/// are divided by when normalized (the intensity for first-order functions,
/// its square for second-order ones). Normalized series keep the value that
/// was used.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub grid: TauGrid,
    pub values: Vec<C64>,
    pub kind: CorrelationKind,
    pub normalization: f64,
}

impl CorrelationSeries {
    pub fn normalize(&self) -> Result<CorrelationSeries> {
        if !self.kind.is_raw() {
            return Ok(self.clone());
        }
        if !(self.normalization > 0.0) {
            return Err(Error::NoScatteredField(self.normalization));
        }
        let inv = 1.0 / self.normalization;
        Ok(CorrelationSeries {
            grid: self.grid,
            values: self.values.iter().map(|v| v * inv).collect(),
            kind: self.kind.normalized(),
            normalization: self.normalization,
        })
    }

    pub fn taus(&self) -> Vec<f64> {
        self.grid.taus()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// Local-oscillator settings for homodyne mixing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneConfig {
    /// LO field amplitude; `α²` is the LO photon flux in the units of `⟨E_V†E_V⟩`.
    pub alpha: f64,
    /// LO phase relative to [`LO_REFERENCE_PHASE`], radians.
    pub phi_lo: f64,
    /// Standard deviation of Gaussian jitter of the lock point, radians.
    pub phase_noise_sigma: f64,
}

impl HomodyneConfig {
    /// LO amplitude giving `I_LO / I_RSF = ratio` for the given signal intensity.
    pub fn from_intensity_ratio(ratio: f64, signal_intensity: f64, phi_lo: f64) -> Self {
        Self {
            alpha: (ratio * signal_intensity).sqrt(),
            phi_lo,
            phase_noise_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !(self.phase_noise_sigma >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "homodyne alpha and phase noise must be >= 0 (got {}, {})",
                self.alpha,
                self.phase_noise_sigma
            )));
        }
        Ok(())
    }

    /// The c-number LO amplitude `α e^{i(φ + φ_ref)}` at LO phase `phi`.
    pub fn lo_amplitude(&self, phi: f64) -> C64 {
        C64::from_polar(self.alpha, phi + LO_REFERENCE_PHASE)
    }
}

/// Generator, steady state and detected field of one parameter set.
#[derive(Debug, Clone)]
pub struct ScatteringModel {
    generator: Superoperator,
    steady: DensityMatrix,
    field: ComplexMatrix,
    tolerances: Tolerances,
}

impl ScatteringModel {
    /// The trion model detected through the cross-polarized port.
    pub fn new(p: &TrionParams) -> Result<Self> {
        Self::with_tolerances(p, Tolerances::DEFAULT)
    }

    pub fn with_tolerances(p: &TrionParams, tolerances: Tolerances) -> Result<Self> {
        p.validate()?;
        p.check_weak_drive();
        Self::from_parts(
            &trion::build_hamiltonian(p),
            &trion::build_collapse_ops(p),
            trion::v_port_field_op(p),
            tolerances,
        )
    }

    /// Any Lindblad model with a chosen detected field operator.
    pub fn from_parts(
        hamiltonian: &ComplexMatrix,
        collapse_ops: &[ComplexMatrix],
        field: ComplexMatrix,
        tolerances: Tolerances,
    ) -> Result<Self> {
        if field.dim() != hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dim(),
                found: field.dim(),
            });
        }
        let generator = liouvillian_with(hamiltonian, collapse_ops, &tolerances)?;
        let steady = steady_state_with(&generator, &tolerances)?;
        Ok(Self {
            generator,
            steady,
            field,
            tolerances,
        })
    }

    pub fn generator(&self) -> &Superoperator {
        &self.generator
    }

    pub fn steady_state(&self) -> &DensityMatrix {
        &self.steady
    }

    pub fn field(&self) -> &ComplexMatrix {
        &self.field
    }

    /// `⟨E†E⟩` in the steady state (photon flux, 1/ns).
    pub fn intensity(&self) -> f64 {
        self.steady.expect(&(&self.field.dagger() * &self.field)).re
    }

    /// `Tr[A e^{Lτ}(X)]` on the grid.
    pub fn two_time(&self, grid: &TauGrid, observable: &ComplexMatrix, initial: &ComplexMatrix) -> Result<Vec<C64>> {
        let prop = Propagator::with_tolerances(&self.generator, grid.step(), &self.tolerances)?;
        // Tr(A X) = vec(Aᵀ) · vec(X) for column-stacked vectors.
        let functional = observable.transpose().vectorize();
        let mut x = DVector::from_vec(initial.vectorize());
        let mut scratch = x.clone();
        let mut out = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            if i > 0 {
                prop.apply_vec(&mut x, &mut scratch);
            }
            out.push(functional.iter().zip(x.iter()).map(|(a, b)| a * b).sum());
        }
        Ok(out)
    }

    /// Unnormalized `G1(τ) = Tr[E† e^{Lτ}(E ρ_ss)] = ⟨E†(τ)E(0)⟩`.
    pub fn raw_g1(&self, grid: &TauGrid) -> Result<CorrelationSeries> {
        let seed = &self.field * self.steady.matrix();
        let values = self.two_time(grid, &self.field.dagger(), &seed)?;
        Ok(CorrelationSeries {
            grid: *grid,
            values,
            kind: CorrelationKind::RawG1,
            normalization: self.intensity(),
        })
    }

    /// Unnormalized `G2(τ) = Tr[E†E e^{Lτ}(E ρ_ss E†)]`.
    pub fn raw_g2(&self, grid: &TauGrid) -> Result<CorrelationSeries> {
        let values = self.second_order(grid, &self.field)?;
        let i = self.intensity();
        Ok(CorrelationSeries {
            grid: *grid,
            values,
            kind: CorrelationKind::RawG2,
            normalization: i * i,
        })
    }

    /// Unnormalized homodyne `G2` with `E_tot = α e^{i(φ+φ_ref)} 𝟙 + E`,
    /// averaged over Gaussian LO phase noise. Normalization is the squared
    /// (averaged) total intensity.
    pub fn raw_g2_hom(&self, grid: &TauGrid, h: &HomodyneConfig) -> Result<CorrelationSeries> {
        h.validate()?;
        let phases: Vec<(f64, f64)> = if h.phase_noise_sigma > 0.0 {
            GaussHermite::new(PHASE_NOISE_NODES).points(h.phi_lo, h.phase_noise_sigma).collect()
        } else {
            vec![(h.phi_lo, 1.0)]
        };
        self.raw_g2_hom_weighted(grid, h, &phases)
    }

    /// Homodyne `G2` averaged uniformly over `n_phases` equally spaced LO phases
    /// in `[0, 2π)` (the unlocked interferometer).
    pub fn raw_g2_hom_uniform(&self, grid: &TauGrid, alpha: f64, n_phases: usize) -> Result<CorrelationSeries> {
        let n = n_phases.max(1);
        let phases: Vec<(f64, f64)> = (0..n)
            .map(|k| (2.0 * PI * k as f64 / n as f64, 1.0 / n as f64))
            .collect();
        let h = HomodyneConfig {
            alpha,
            phi_lo: 0.0,
            phase_noise_sigma: 0.0,
        };
        self.raw_g2_hom_weighted(grid, &h, &phases)
    }

    fn raw_g2_hom_weighted(&self, grid: &TauGrid, h: &HomodyneConfig, phases: &[(f64, f64)]) -> Result<CorrelationSeries> {
        let dim = self.field.dim();
        let mut values = vec![C64::new(0.0, 0.0); grid.len()];
        let mut intensity = 0.0;
        for &(phi, w) in phases {
            let total = &ComplexMatrix::identity(dim).scale(h.lo_amplitude(phi)) + &self.field;
            let g = self.second_order(grid, &total)?;
            for (acc, v) in values.iter_mut().zip(g) {
                *acc += v * w;
            }
            intensity += w * self.steady.expect(&(&total.dagger() * &total)).re;
        }
        Ok(CorrelationSeries {
            grid: *grid,
            values,
            kind: CorrelationKind::RawG2Hom,
            normalization: intensity * intensity,
        })
    }

    fn second_order(&self, grid: &TauGrid, e: &ComplexMatrix) -> Result<Vec<C64>> {
        let n = &e.dagger() * e;
        let seed = &(e * self.steady.matrix()) * &e.dagger();
        self.two_time(grid, &n, &seed)
    }
}

fn checked_model(p: &TrionParams, grid: &TauGrid) -> Result<ScatteringModel> {
    grid.check(p)?;
    ScatteringModel::new(p)
}

fn require_field(series: CorrelationSeries) -> Result<CorrelationSeries> {
    let scale = series.normalization;
    if !(scale > 1e-24) {
        return Err(Error::NoScatteredField(scale));
    }
    Ok(series)
}

/// Unnormalized first-order correlation of the V port.
pub fn raw_g1(p: &TrionParams, grid: &TauGrid) -> Result<CorrelationSeries> {
    checked_model(p, grid)?.raw_g1(grid)
}

/// Normalized first-order correlation `g1(τ) = G1(τ)/⟨E_V†E_V⟩` of the V port.
pub fn g1(p: &TrionParams, grid: &TauGrid) -> Result<CorrelationSeries> {
    require_field(raw_g1(p, grid)?)?.normalize()
}

pub fn raw_g2(p: &TrionParams, grid: &TauGrid) -> Result<CorrelationSeries> {
    checked_model(p, grid)?.raw_g2(grid)
}

/// Normalized intensity correlation of the V port (HBT with no LO).
pub fn g2(p: &TrionParams, grid: &TauGrid) -> Result<CorrelationSeries> {
    require_field(raw_g2(p, grid)?)?.normalize()
}

pub fn raw_g2_hom(p: &TrionParams, h: &HomodyneConfig, grid: &TauGrid) -> Result<CorrelationSeries> {
    let model = checked_model(p, grid)?;
    if !(model.intensity() > 1e-12) {
        return Err(Error::NoScatteredField(model.intensity()));
    }
    model.raw_g2_hom(grid, h)
}

/// Homodyne intensity correlation of the V port mixed with a coherent LO.
pub fn g2_hom(p: &TrionParams, h: &HomodyneConfig, grid: &TauGrid) -> Result<CorrelationSeries> {
    raw_g2_hom(p, h, grid)?.normalize()
}

/// Emission spectrum relative to the drive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    /// Angular frequency offsets from the drive, ascending, rad/ns.
    pub omega_grid: Vec<f64>,
    /// Spectral density (units of the input correlation × ns).
    pub values: Vec<f64>,
}

impl SpectrumSeries {
    pub fn bin_width(&self) -> f64 {
        if self.omega_grid.len() < 2 {
            return 0.0;
        }
        self.omega_grid[1] - self.omega_grid[0]
    }

    /// `∫ S(ω) dω` as a rectangle sum over the periodic grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width()
    }

    /// Intensity-weighted mean frequency.
    pub fn centroid(&self) -> f64 {
        let total: f64 = self.values.iter().sum();
        self.omega_grid.iter().zip(&self.values).map(|(w, s)| w * s).sum::<f64>() / total
    }
}

/// Zero-padding of the discrete transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// The series is zero-padded to `pad_factor × next_power_of_two(len)` samples.
    pub pad_factor: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { pad_factor: 4 }
    }
}

/// `S(ω) = (1/π) Re ∫₀^∞ G1(τ) e^{-iωτ} dτ` from an unnormalized G1 series.
///
/// With `G1(τ) = ⟨E†(τ)E(0)⟩`, light at `ω_d + ω` contributes `e^{iωτ}`, so
/// the kernel `e^{-iωτ}` puts it at `+ω`. The integral uses trapezoid weights
/// on the τ grid (half weight at τ = 0) and zero padding; the window must
/// reach `min_tau_max`.
pub fn spectrum(g1_series: &CorrelationSeries, min_tau_max: f64) -> Result<SpectrumSeries> {
    spectrum_with(g1_series, min_tau_max, SpectrumOptions::default())
}

pub fn spectrum_with(g1_series: &CorrelationSeries, min_tau_max: f64, opts: SpectrumOptions) -> Result<SpectrumSeries> {
    if g1_series.kind != CorrelationKind::RawG1 {
        return Err(Error::WrongKind {
            expected: CorrelationKind::RawG1.name(),
            found: g1_series.kind.name(),
        });
    }
    let grid = g1_series.grid;
    if grid.tau_max() < min_tau_max {
        return Err(Error::InsufficientTauMax {
            have: grid.tau_max(),
            required: min_tau_max,
        });
    }
    let n_fft = grid.len().next_power_of_two() * opts.pad_factor.max(1).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); n_fft];
    for (i, v) in g1_series.values.iter().enumerate() {
        buf[i] = if i == 0 { *v * 0.5 } else { *v };
    }
    fft_in_place(&mut buf);
    let dtau = grid.step();
    let d_omega = 2.0 * PI / (n_fft as f64 * dtau);
    let half = n_fft / 2;
    let mut omega_grid = Vec::with_capacity(n_fft);
    let mut values = Vec::with_capacity(n_fft);
    for k in 0..n_fft {
        // Reorder to ascending frequency: bins half..n are negative.
        let src = (k + half) % n_fft;
        let signed = k as f64 - half as f64;
        omega_grid.push(signed * d_omega);
        values.push(buf[src].re * dtau / PI);
    }
    Ok(SpectrumSeries { omega_grid, values })
}

/// Interferometer visibility `V(τ) = v0·|g1(τ)|`.
pub fn visibility(g1_series: &CorrelationSeries, v0: f64) -> Result<Vec<f64>> {
    if !(v0 > 0.0 && v0 <= 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("visibility scale must be in (0, 1], got {v0}")));
    }
    let g = g1_series.normalize()?;
    Ok(g.values.iter().map(|z| v0 * z.norm()).collect())
}
