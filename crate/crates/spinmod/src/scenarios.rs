// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! The five experiment scenarios. Each one resolves model parameters from a
//! [`RunConfig`], runs the core pipeline and returns a [`ResultTable`].
//!
//! Independent pieces of work (LO phases, detunings, trajectories) are spread
//! over the current rayon pool and collected in input order, so results do
//! not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;
use spinmod_core::dynamics::{visibility, CorrelationSeries, HomodyneConfig, ScatteringModel, SpectrumSeries, TauGrid};
use spinmod_core::ensemble::{average_over_detuning, average_over_overhauser, convolve_detector_jitter, JitterKind, JitterModel, Observable};
use spinmod_core::scatter::beta_factor;
use spinmod_core::trajectories::{correlate, stream_statistics, Detection, StreamPlan, TimeTagStream, TrajectoryConfig, TrajectoryTags};
use spinmod_core::trion::{SpinDephasing, TrionParams};
use toml::Value;

use crate::config::{DephasingModel, DetectionMode, RunConfig, Units};
use crate::error::{CliError, Result};
use crate::output::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Mzi,
    Spectrum,
    Hbt,
    Homodyne,
    Trajectories,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Mzi => "mzi",
            Scenario::Spectrum => "spectrum",
            Scenario::Hbt => "hbt",
            Scenario::Homodyne => "homodyne",
            Scenario::Trajectories => "trajectories",
        }
    }
}

/// Tables plus, for trajectory runs, the generated tag stream.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub table: ResultTable,
    pub tags: Option<TimeTagStream>,
}

pub fn run(scenario: Scenario, cfg: &RunConfig) -> Result<ScenarioOutput> {
    let table = match scenario {
        Scenario::Mzi => run_mzi(cfg)?,
        Scenario::Spectrum => run_spectrum(cfg)?,
        Scenario::Hbt => run_hbt(cfg)?,
        Scenario::Homodyne => run_homodyne(cfg)?,
        Scenario::Trajectories => {
            let (table, tags) = run_trajectories(cfg)?;
            return Ok(ScenarioOutput { table, tags: Some(tags) });
        }
    };
    Ok(ScenarioOutput { table, tags: None })
}

fn is_quasistatic(cfg: &RunConfig) -> bool {
    cfg.model.spin_dephasing == DephasingModel::Quasistatic
}

/// Parameters that set grid resolution and window: the model itself, or with
/// the Overhauser width attached for quasistatic runs.
fn grid_params(cfg: &RunConfig, p: &TrionParams) -> Result<TrionParams> {
    if is_quasistatic(cfg) {
        let sigma_oh = cfg.overhauser_jitter()?.sigma();
        return Ok(TrionParams {
            spin_dephasing: SpinDephasing::Quasistatic { sigma_oh },
            ..*p
        });
    }
    Ok(*p)
}

fn tau_grid(cfg: &RunConfig, p: &TrionParams) -> Result<TauGrid> {
    let q = grid_params(cfg, p)?;
    let grid = match (cfg.grid.tau_max_ns > 0.0, cfg.grid.n_points) {
        (false, 0) => TauGrid::default_for(&q),
        (false, n) => TauGrid::new(TauGrid::default_for(&q).tau_max(), n)?,
        (true, 0) => TauGrid::covering(&q, cfg.grid.tau_max_ns, TauGrid::DEFAULT_POINTS),
        (true, n) => TauGrid::new(cfg.grid.tau_max_ns, n)?,
    };
    grid.check(&q)?;
    Ok(grid)
}

/// A normalized correlation, averaged over the configured ensemble.
fn averaged(cfg: &RunConfig, p: &TrionParams, obs: Observable, grid: &TauGrid, spectral: bool) -> Result<CorrelationSeries> {
    Ok(ensemble(cfg, p, obs, grid, spectral)?.correlation()?)
}

fn ensemble(
    cfg: &RunConfig,
    p: &TrionParams,
    obs: Observable,
    grid: &TauGrid,
    spectral: bool,
) -> Result<spinmod_core::ensemble::EnsembleOutput> {
    let out = match (is_quasistatic(cfg), spectral) {
        (true, true) => {
            return Err(CliError::Config(
                "spectral averaging cannot be combined with quasistatic spin dephasing".into(),
            ))
        }
        (true, false) => average_over_overhauser(p, &cfg.overhauser_jitter()?, &obs, grid)?,
        (false, true) => average_over_detuning(p, &cfg.spectral_jitter()?, &obs, grid)?,
        (false, false) => {
            let none = JitterModel::new(JitterKind::GaussianDetuning, 0.0, JitterModel::DEFAULT_SAMPLES)?;
            average_over_detuning(p, &none, &obs, grid)?
        }
    };
    Ok(out)
}

/// Frequency in rad/ns expressed in the requested units (GHz or ω/Γ).
fn freq(units: Units, w: f64, gamma: f64) -> f64 {
    match units {
        Units::Gamma => w / gamma,
        _ => w / (2.0 * PI),
    }
}

fn freq_suffix(units: Units) -> &'static str {
    match units {
        Units::Gamma => "over_gamma",
        _ => "ghz",
    }
}

fn note_model(t: &mut ResultTable, cfg: &RunConfig, p: &TrionParams, scenario: &str) -> Result<()> {
    let units = cfg.units_for(scenario);
    let s = freq_suffix(units);
    t.note(&format!("larmor_{s}"), Value::Float(freq(units, p.larmor(), p.gamma)));
    t.note("gamma_per_ns", Value::Float(p.gamma));
    t.note("omega_rabi_per_ns", Value::Float(p.omega_rabi));
    t.note("spin_dephasing_rate_per_ns", Value::Float(p.spin_dephasing.markovian_rate()));
    t.note("beta_factor", Value::Float(beta_factor(&cfg.cavity_params())?));
    Ok(())
}

fn model_params(cfg: &RunConfig) -> Result<TrionParams> {
    let p = cfg.params()?;
    p.check_weak_drive();
    Ok(p)
}

/// Interferometer visibility: `tau_ns, g1_abs, visibility`.
pub fn run_mzi(cfg: &RunConfig) -> Result<ResultTable> {
    let p = model_params(cfg)?;
    let grid = tau_grid(cfg, &p)?;
    let g1 = averaged(cfg, &p, Observable::G1, &grid, cfg.ensemble.spectral_average)?;
    let mut t = ResultTable::new("mzi", "mzi", cfg);
    note_model(&mut t, cfg, &p, "mzi")?;
    t.note("intensity_per_ns", Value::Float(g1.normalization));
    t.push("tau_ns", grid.taus());
    t.push("g1_abs", g1.abs());
    t.push("visibility", visibility(&g1, cfg.v0)?);
    Ok(t)
}

/// Emission spectra for each detuning in the scan, in long format: one block
/// of rows per Δ, restricted to |ω| within the configured window. Spectral
/// densities are per unit of the emitted frequency axis, and the V-port
/// intensity is repeated on every row of its block.
pub fn run_spectrum(cfg: &RunConfig) -> Result<ResultTable> {
    let p = model_params(cfg)?;
    let grid = tau_grid(cfg, &p)?;
    let q = grid_params(cfg, &p)?;
    let slowest = q.spin_coherence_time().unwrap_or(0.0).max(1.0 / p.gamma);
    let min_tau_max = (5.0 * slowest).min(grid.tau_max());
    let deltas: Vec<f64> = cfg.grid.delta_scan_over_gamma.iter().map(|d| d * p.gamma).collect();
    let blocks: Vec<Result<(SpectrumSeries, f64)>> = deltas
        .par_iter()
        .map(|&d| {
            let member = p.with_delta(d);
            let s = ensemble(cfg, &member, Observable::Spectrum { min_tau_max }, &grid, cfg.ensemble.spectral_average)?.spectrum()?;
            let intensity = ScatteringModel::new(&member)?.intensity();
            Ok((s, intensity))
        })
        .collect();

    let units = cfg.units_for("spectrum");
    let sfx = freq_suffix(units);
    // Density per unit of the emitted axis: S dω = S' d(axis).
    let density = match units {
        Units::Gamma => p.gamma,
        _ => 2.0 * PI,
    };
    let window = cfg.grid.spectrum_window_over_gamma * p.gamma;
    let (mut dcol, mut wcol, mut scol, mut icol) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (&d, block) in deltas.iter().zip(blocks) {
        let (s, intensity) = block?;
        for (&w, &v) in s.omega_grid.iter().zip(&s.values) {
            if w.abs() <= window {
                dcol.push(freq(units, d, p.gamma));
                wcol.push(freq(units, w, p.gamma));
                scol.push(v * density);
                icol.push(intensity);
            }
        }
    }
    let mut t = ResultTable::new("spectrum", "spectrum", cfg);
    note_model(&mut t, cfg, &p, "spectrum")?;
    t.push(&format!("delta_{sfx}"), dcol);
    t.push(&format!("omega_{sfx}"), wcol);
    t.push("s_of_omega", scol);
    t.push("intensity_per_ns", icol);
    Ok(t)
}

/// Intensity correlation: ideal, detector-jittered and spectrally averaged.
pub fn run_hbt(cfg: &RunConfig) -> Result<ResultTable> {
    let p = model_params(cfg)?;
    let grid = tau_grid(cfg, &p)?;
    let (ideal, ens) = rayon::join(
        || averaged(cfg, &p, Observable::G2, &grid, false),
        || averaged(cfg, &p, Observable::G2, &grid, !is_quasistatic(cfg)),
    );
    let ideal = ideal?;
    let jittered = convolve_detector_jitter(&ideal, &cfg.detector_model())?;
    let mut t = ResultTable::new("hbt", "hbt", cfg);
    note_model(&mut t, cfg, &p, "hbt")?;
    t.push("tau_ns", grid.taus());
    t.push("g2", ideal.real());
    t.push("g2_jittered", jittered.real());
    t.push("g2_ensemble", ens?.real());
    Ok(t)
}

/// Column name for a homodyne phase.
pub fn phase_column(phi: f64) -> String {
    format!("g2_hom_phi_{phi:.4}")
}

/// Homodyne intensity correlation per requested LO phase, plus the average
/// over `uniform_phases` equally spaced phases (the unlocked interferometer).
pub fn run_homodyne(cfg: &RunConfig) -> Result<ResultTable> {
    let p = model_params(cfg)?;
    let grid = tau_grid(cfg, &p)?;
    let spectral = cfg.ensemble.spectral_average;
    let intensity = ScatteringModel::new(&p)?.intensity();
    let homodyne = |phi: f64| HomodyneConfig {
        phase_noise_sigma: cfg.homodyne.phase_noise_rad,
        ..HomodyneConfig::from_intensity_ratio(cfg.homodyne.lo_ratio, intensity, phi)
    };
    let locked: Vec<Result<CorrelationSeries>> = cfg
        .homodyne
        .phi_lo
        .par_iter()
        .map(|&phi| averaged(cfg, &p, Observable::G2Hom(homodyne(phi)), &grid, spectral))
        .collect();

    let n_uniform = cfg.homodyne.uniform_phases;
    let uniform = if n_uniform == 0 {
        None
    } else if !spectral && !is_quasistatic(cfg) {
        let alpha = homodyne(0.0).alpha;
        Some(ScatteringModel::new(&p)?.raw_g2_hom_uniform(&grid, alpha, n_uniform)?.normalize()?.real())
    } else {
        // Average the unnormalized members, then normalize by the squared
        // phase-averaged intensity, as for a single model.
        let members: Vec<Result<CorrelationSeries>> = (0..n_uniform)
            .into_par_iter()
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n_uniform as f64;
                let h = HomodyneConfig {
                    phase_noise_sigma: 0.0,
                    ..homodyne(phi)
                };
                averaged(cfg, &p, Observable::G2Hom(h), &grid, spectral)
            })
            .collect();
        let mut raw = vec![0.0; grid.len()];
        let mut mean_i = 0.0;
        for m in members {
            let m = m?;
            for (acc, v) in raw.iter_mut().zip(&m.values) {
                *acc += v.re * m.normalization;
            }
            mean_i += m.normalization.sqrt();
        }
        mean_i /= n_uniform as f64;
        let scale = 1.0 / (n_uniform as f64 * mean_i * mean_i);
        Some(raw.into_iter().map(|v| v * scale).collect())
    };

    let mut t = ResultTable::new("homodyne", "homodyne", cfg);
    note_model(&mut t, cfg, &p, "homodyne")?;
    t.note("signal_intensity_per_ns", Value::Float(intensity));
    t.note("lo_amplitude", Value::Float(homodyne(0.0).alpha));
    t.push("tau_ns", grid.taus());
    for (&phi, series) in cfg.homodyne.phi_lo.iter().zip(locked) {
        t.push(&phase_column(phi), series?.real());
    }
    if let Some(u) = uniform {
        t.push("g2_hom_uniform", u);
    }
    Ok(t)
}

/// Model value averaged over a histogram bin `[|lag| − w/2, |lag| + w/2]`
/// (clipped at zero), by linear interpolation on the τ grid.
fn bin_average(grid: &TauGrid, values: &[f64], lag: f64, width: f64) -> f64 {
    const SAMPLES: usize = 32;
    let lo = (lag.abs() - width / 2.0).max(0.0);
    let hi = lag.abs() + width / 2.0;
    let at = |tau: f64| {
        let x = tau / grid.step();
        let i = (x.floor() as usize).min(grid.len() - 2);
        let f = x - i as f64;
        values[i] * (1.0 - f) + values[i + 1] * f
    };
    (0..SAMPLES)
        .map(|k| at(lo + (hi - lo) * (k as f64 + 0.5) / SAMPLES as f64))
        .sum::<f64>()
        / SAMPLES as f64
}

/// Resolved trajectory settings for `p`.
pub fn trajectory_config(cfg: &RunConfig, p: &TrionParams) -> Result<TrajectoryConfig> {
    if is_quasistatic(cfg) {
        return Err(CliError::Config(
            "trajectories need Markovian spin dephasing (quasistatic averaging is not unraveled)".into(),
        ));
    }
    let detection = match cfg.trajectories.detection {
        DetectionMode::Hbt => Detection::Hbt,
        DetectionMode::Homodyne => {
            let phi = *cfg
                .homodyne
                .phi_lo
                .first()
                .ok_or_else(|| CliError::Config("homodyne trajectories need homodyne.phi_lo".into()))?;
            let intensity = ScatteringModel::new(p)?.intensity();
            Detection::Homodyne(HomodyneConfig {
                phase_noise_sigma: cfg.homodyne.phase_noise_rad,
                ..HomodyneConfig::from_intensity_ratio(cfg.homodyne.lo_ratio, intensity, phi)
            })
        }
    };
    let dt = match cfg.trajectories.dt_ns {
        0.0 => TrajectoryConfig::max_dt(p, &detection),
        dt => dt,
    };
    Ok(TrajectoryConfig {
        n_trajectories: cfg.trajectories.count,
        duration: cfg.trajectories.duration_ns,
        dt,
        seed: cfg.seed,
        detection,
    })
}

/// Simulates the configured trajectories on the current rayon pool.
pub fn simulate(cfg: &RunConfig, p: &TrionParams) -> Result<TimeTagStream> {
    let tc = trajectory_config(cfg, p)?;
    let plan = StreamPlan::new(p, &tc, &cfg.detector_model())?;
    let runs: Vec<TrajectoryTags> = (0..tc.n_trajectories).into_par_iter().map(|i| plan.run(i)).collect();
    Ok(plan.merge(runs))
}

/// Monte Carlo time tags, their coincidence histogram and the matching
/// regression-theorem model averaged over each bin.
pub fn run_trajectories(cfg: &RunConfig) -> Result<(ResultTable, TimeTagStream)> {
    let p = model_params(cfg)?;
    let tc = trajectory_config(cfg, &p)?;
    let stream = simulate(cfg, &p)?;
    let bin = cfg.trajectories.bin_ps * 1e-3;
    let tau_max = cfg.trajectories.tau_max_ns;
    let hist = correlate(&stream, bin, tau_max)?;
    let stats = stream_statistics(&stream, tau_max);

    let det = cfg.detector_model();
    let grid = TauGrid::covering(&p, tau_max + bin, TauGrid::DEFAULT_POINTS);
    let model = match tc.detection {
        Detection::Hbt => ScatteringModel::new(&p)?.raw_g2(&grid)?,
        Detection::Homodyne(h) => ScatteringModel::new(&p)?.raw_g2_hom(&grid, &h)?,
    }
    .normalize()?;
    let model = convolve_detector_jitter(&model, &det)?.real();
    let g2_model: Vec<f64> = hist.lags.iter().map(|&lag| bin_average(&grid, &model, lag, hist.bin_width())).collect();

    let mut t = ResultTable::new("trajectories", "trajectories", cfg);
    note_model(&mut t, cfg, &p, "trajectories")?;
    t.note("dt_ns", Value::Float(tc.dt));
    t.note("counts_a", Value::Integer(stats.counts_a as i64));
    t.note("counts_b", Value::Integer(stats.counts_b as i64));
    t.note("rate_a_per_ns", Value::Float(stats.rate_a));
    t.note("rate_b_per_ns", Value::Float(stats.rate_b));
    t.note("normalization", Value::Float(hist.normalization));
    t.push("lag_ns", hist.lags.clone());
    t.push("counts", hist.counts.iter().map(|&c| c as f64).collect());
    t.push("g2_hist", hist.normalized());
    t.push("g2_err", hist.normalized_errors());
    t.push("g2_model", g2_model);
    Ok((t, stream))
}
