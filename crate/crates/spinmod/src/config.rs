// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a flat set of dotted keys layered over a preset.
//!
//! Sources are applied in order (preset defaults, config file, command-line
//! overrides). The resolved configuration is echoed into every output file
//! as `# key = value` lines, which parse back as the same configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use spinmod_core::ensemble::{DetectorModel, JitterKind, JitterModel};
use spinmod_core::presets::{calibrate_spin_dephasing, Preset};
use spinmod_core::scatter::CavityParams;
use spinmod_core::trion::{from_physical, larmor_splitting, ParamOverrides, PhysicalInputs, SpinDephasing, TrionParams};
use spinmod_core::units::{fwhm_to_sigma, ghz_to_rad_per_ns, mhz_to_rad_per_ns, uev_to_rad_per_ns, BOHR_MAGNETON_GHZ_PER_T};
use toml::Value;

use crate::error::{CliError, Result};

pub type Entries = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingModel {
    Markovian,
    Quasistatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// SI for every scenario except the spectrum, which defaults to ω/Γ.
    Auto,
    Si,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionMode {
    Hbt,
    Homodyne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Electron precession frequency 2ω_b/2π.
    pub larmor_mhz: f64,
    pub hole_larmor_mhz: f64,
    /// QD–laser detuning Δ/2π.
    pub delta_mhz: f64,
    /// Spin dephasing time; 0 disables spin dephasing.
    pub t2_star_ns: f64,
    pub spin_dephasing: DephasingModel,
    /// Match the simulated precession envelope to `t2_star_ns` (Markovian only).
    pub calibrate_t2: bool,
    pub gamma_opt_deph_over_gamma: f64,
}

/// Cavity parameters as ordinary frequencies, GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub kappa_ghz: f64,
    pub kappa_ext_ghz: f64,
    pub g_ghz: f64,
    pub gamma_x_ghz: f64,
    pub delta_c_ghz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub spectral_fwhm_uev: f64,
    /// Overhauser width of 2ω_b/2π; 0 derives it from T₂*.
    pub overhauser_fwhm_mhz: f64,
    /// Quadrature nodes; 0 picks the smallest admissible count.
    pub n_samples: usize,
    /// Apply spectral jitter in mzi, homodyne and spectrum runs (hbt always
    /// reports the averaged column).
    pub spectral_average: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub jitter_ps: f64,
    pub efficiency: f64,
    pub bin_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneSettings {
    pub lo_ratio: f64,
    /// LO phases, radians.
    pub phi_lo: Vec<f64>,
    pub phase_noise_rad: f64,
    /// Phases in the uniform average column; 0 omits the column.
    pub uniform_phases: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// 0 picks a window from the coherence time.
    pub tau_max_ns: f64,
    /// 0 picks the point count from the resolution rule.
    pub n_points: usize,
    pub delta_scan_over_gamma: Vec<f64>,
    /// Half-width of the emitted spectrum window, in Γ.
    pub spectrum_window_over_gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySettings {
    pub count: usize,
    pub duration_ns: f64,
    /// 0 picks the largest admissible step.
    pub dt_ns: f64,
    pub detection: DetectionMode,
    pub tau_max_ns: f64,
    pub bin_ps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
    pub units: Units,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub physical: PhysicalInputs,
    pub model: ModelConfig,
    pub cavity: CavityConfig,
    pub ensemble: EnsembleConfig,
    pub detector: DetectorConfig,
    pub homodyne: HomodyneSettings,
    pub grid: GridConfig,
    pub v0: f64,
    pub trajectories: TrajectorySettings,
    pub output: OutputConfig,
    pub seed: u64,
}

const PRESETS: [&str; 4] = ["qd1", "qd2", "spectrum", "custom"];

impl RunConfig {
    /// Defaults for a named preset. `custom` starts from the QD1 device with
    /// the precession frequency taken from the g-factor and field.
    pub fn preset(name: &str) -> Result<Self> {
        let base = match name {
            "custom" => Preset::by_name("qd1"),
            other => Preset::by_name(other),
        }
        .ok_or_else(|| CliError::Config(format!("unknown preset '{name}' (expected one of {})", PRESETS.join(", "))))?;
        let physical = base.physical;
        let larmor_mhz = if name == "custom" {
            larmor_splitting(physical.g_b, physical.b_field) / (2.0 * PI) * 1e3
        } else {
            base.larmor_mhz
        };
        Ok(RunConfig {
            preset: name.to_string(),
            physical,
            model: ModelConfig {
                larmor_mhz,
                hole_larmor_mhz: 0.0,
                delta_mhz: 0.0,
                t2_star_ns: base.t2_star,
                spin_dephasing: DephasingModel::Markovian,
                calibrate_t2: true,
                gamma_opt_deph_over_gamma: base.gamma_opt_deph_over_gamma,
            },
            cavity: CavityConfig {
                kappa_ghz: 25.0,
                kappa_ext_ghz: 20.0,
                g_ghz: 6.0,
                gamma_x_ghz: 1.0 / physical.t1 / (2.0 * PI),
                delta_c_ghz: 0.0,
            },
            ensemble: EnsembleConfig {
                spectral_fwhm_uev: base.spectral_jitter_uev,
                overhauser_fwhm_mhz: 0.0,
                n_samples: 0,
                spectral_average: false,
            },
            detector: DetectorConfig {
                jitter_ps: base.detector.jitter_sigma * 1e3,
                efficiency: base.detector.efficiency,
                bin_ps: base.detector.bin_width * 1e3,
            },
            homodyne: HomodyneSettings {
                lo_ratio: base.lo_ratio,
                phi_lo: vec![0.0, PI / 2.0],
                phase_noise_rad: 0.0,
                uniform_phases: 8,
            },
            grid: GridConfig {
                tau_max_ns: 0.0,
                n_points: 0,
                delta_scan_over_gamma: vec![0.0],
                spectrum_window_over_gamma: 3.0,
            },
            v0: base.v0,
            trajectories: TrajectorySettings {
                count: 40,
                duration_ns: 1.0e5,
                dt_ns: 0.0,
                detection: DetectionMode::Hbt,
                tau_max_ns: 10.0,
                bin_ps: 200.0,
            },
            output: OutputConfig {
                dir: PathBuf::from("."),
                format: Format::Csv,
                units: Units::Auto,
            },
            seed: 1,
        })
    }

    /// Builds a configuration from layered entry sets. The preset comes from
    /// the last layer naming one (default `qd1`). A field change without an
    /// explicit `model.larmor_mhz` rescales the preset's precession frequency
    /// (or recomputes it from the g-factor for `custom`).
    pub fn resolve(layers: &[Entries]) -> Result<Self> {
        let mut preset = "qd1".to_string();
        for layer in layers {
            if let Some(v) = layer.get("preset") {
                preset = as_str("preset", v)?.to_string();
            }
        }
        let mut cfg = RunConfig::preset(&preset)?;
        let defaults = cfg.physical;
        let mut explicit = BTreeSet::new();
        for layer in layers {
            for (k, v) in layer {
                cfg.set(k, v)?;
                explicit.insert(k.as_str());
            }
        }
        if !explicit.contains("model.larmor_mhz") {
            if preset == "custom" {
                cfg.model.larmor_mhz = larmor_splitting(cfg.physical.g_b, cfg.physical.b_field) / (2.0 * PI) * 1e3;
            } else if cfg.physical.b_field != defaults.b_field {
                cfg.model.larmor_mhz *= cfg.physical.b_field / defaults.b_field;
            }
        }
        if !explicit.contains("model.hole_larmor_mhz") {
            cfg.model.hole_larmor_mhz = cfg.physical.g_h * BOHR_MAGNETON_GHZ_PER_T * cfg.physical.b_field * 1e3;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one dotted key. Keys under `meta.` are informational and ignored.
    pub fn set(&mut self, key: &str, v: &Value) -> Result<()> {
        match key {
            "preset" => {
                if as_str(key, v)? != self.preset {
                    return Err(CliError::Config("preset must be applied before other keys".into()));
                }
            }
            "seed" => {
                let s = as_int(key, v)?;
                self.seed = u64::try_from(s).map_err(|_| CliError::Config(format!("seed must be >= 0, got {s}")))?;
            }
            "physical.t1_ns" => self.physical.t1 = as_f64(key, v)?,
            "physical.b_field_mt" => self.physical.b_field = as_f64(key, v)? / 1e3,
            "physical.g_electron" => self.physical.g_b = as_f64(key, v)?,
            "physical.g_hole" => self.physical.g_h = as_f64(key, v)?,
            "physical.p_over_psat" => self.physical.p_over_psat = as_f64(key, v)?,
            "model.larmor_mhz" => self.model.larmor_mhz = as_f64(key, v)?,
            "model.hole_larmor_mhz" => self.model.hole_larmor_mhz = as_f64(key, v)?,
            "model.delta_mhz" => self.model.delta_mhz = as_f64(key, v)?,
            "model.t2_star_ns" => self.model.t2_star_ns = as_f64(key, v)?,
            "model.spin_dephasing" => {
                self.model.spin_dephasing = match as_str(key, v)? {
                    "markovian" => DephasingModel::Markovian,
                    "quasistatic" => DephasingModel::Quasistatic,
                    s => return Err(bad_choice(key, s, "markovian, quasistatic")),
                }
            }
            "model.calibrate_t2" => self.model.calibrate_t2 = as_bool(key, v)?,
            "model.gamma_opt_deph_over_gamma" => self.model.gamma_opt_deph_over_gamma = as_f64(key, v)?,
            "cavity.kappa_ghz" => self.cavity.kappa_ghz = as_f64(key, v)?,
            "cavity.kappa_ext_ghz" => self.cavity.kappa_ext_ghz = as_f64(key, v)?,
            "cavity.g_ghz" => self.cavity.g_ghz = as_f64(key, v)?,
            "cavity.gamma_x_ghz" => self.cavity.gamma_x_ghz = as_f64(key, v)?,
            "cavity.delta_c_ghz" => self.cavity.delta_c_ghz = as_f64(key, v)?,
            "ensemble.spectral_fwhm_uev" => self.ensemble.spectral_fwhm_uev = as_f64(key, v)?,
            "ensemble.overhauser_fwhm_mhz" => self.ensemble.overhauser_fwhm_mhz = as_f64(key, v)?,
            "ensemble.n_samples" => self.ensemble.n_samples = as_usize(key, v)?,
            "ensemble.spectral_average" => self.ensemble.spectral_average = as_bool(key, v)?,
            "detector.jitter_ps" => self.detector.jitter_ps = as_f64(key, v)?,
            "detector.efficiency" => self.detector.efficiency = as_f64(key, v)?,
            "detector.bin_ps" => self.detector.bin_ps = as_f64(key, v)?,
            "homodyne.lo_ratio" => self.homodyne.lo_ratio = as_f64(key, v)?,
            "homodyne.phi_lo" => self.homodyne.phi_lo = as_angles(key, v)?,
            "homodyne.phase_noise_rad" => self.homodyne.phase_noise_rad = as_f64(key, v)?,
            "homodyne.uniform_phases" => self.homodyne.uniform_phases = as_usize(key, v)?,
            "grid.tau_max_ns" => self.grid.tau_max_ns = as_f64(key, v)?,
            "grid.n_points" => self.grid.n_points = as_usize(key, v)?,
            "grid.delta_scan_over_gamma" => self.grid.delta_scan_over_gamma = as_f64_list(key, v)?,
            "grid.spectrum_window_over_gamma" => self.grid.spectrum_window_over_gamma = as_f64(key, v)?,
            "visibility.v0" => self.v0 = as_f64(key, v)?,
            "trajectories.count" => self.trajectories.count = as_usize(key, v)?,
            "trajectories.duration_ns" => self.trajectories.duration_ns = as_f64(key, v)?,
            "trajectories.dt_ns" => self.trajectories.dt_ns = as_f64(key, v)?,
            "trajectories.detection" => {
                self.trajectories.detection = match as_str(key, v)? {
                    "hbt" => DetectionMode::Hbt,
                    "homodyne" => DetectionMode::Homodyne,
                    s => return Err(bad_choice(key, s, "hbt, homodyne")),
                }
            }
            "trajectories.tau_max_ns" => self.trajectories.tau_max_ns = as_f64(key, v)?,
            "trajectories.bin_ps" => self.trajectories.bin_ps = as_f64(key, v)?,
            "output.dir" => self.output.dir = PathBuf::from(as_str(key, v)?),
            "output.format" => self.output.format = parse_format(as_str(key, v)?)?,
            "output.units" => self.output.units = parse_units(as_str(key, v)?)?,
            k if k.starts_with("meta.") => {}
            k => return Err(CliError::Config(format!("unknown configuration key '{k}'"))),
        }
        Ok(())
    }

    /// Every key with its resolved value, in a stable order.
    pub fn entries(&self) -> Vec<(&'static str, Value)> {
        let f = Value::Float;
        let n = |x: usize| Value::Integer(x as i64);
        let list = |xs: &[f64]| Value::Array(xs.iter().copied().map(Value::Float).collect());
        let s = |x: &str| Value::String(x.to_string());
        vec![
            ("preset", s(&self.preset)),
            ("seed", Value::Integer(self.seed as i64)),
            ("physical.t1_ns", f(self.physical.t1)),
            // Rounded to nano-tesla so a replayed echo restores the same field.
            ("physical.b_field_mt", f((self.physical.b_field * 1e12).round() / 1e9)),
            ("physical.g_electron", f(self.physical.g_b)),
            ("physical.g_hole", f(self.physical.g_h)),
            ("physical.p_over_psat", f(self.physical.p_over_psat)),
            ("model.larmor_mhz", f(self.model.larmor_mhz)),
            ("model.hole_larmor_mhz", f(self.model.hole_larmor_mhz)),
            ("model.delta_mhz", f(self.model.delta_mhz)),
            ("model.t2_star_ns", f(self.model.t2_star_ns)),
            (
                "model.spin_dephasing",
                s(match self.model.spin_dephasing {
                    DephasingModel::Markovian => "markovian",
                    DephasingModel::Quasistatic => "quasistatic",
                }),
            ),
            ("model.calibrate_t2", Value::Boolean(self.model.calibrate_t2)),
            ("model.gamma_opt_deph_over_gamma", f(self.model.gamma_opt_deph_over_gamma)),
            ("cavity.kappa_ghz", f(self.cavity.kappa_ghz)),
            ("cavity.kappa_ext_ghz", f(self.cavity.kappa_ext_ghz)),
            ("cavity.g_ghz", f(self.cavity.g_ghz)),
            ("cavity.gamma_x_ghz", f(self.cavity.gamma_x_ghz)),
            ("cavity.delta_c_ghz", f(self.cavity.delta_c_ghz)),
            ("ensemble.spectral_fwhm_uev", f(self.ensemble.spectral_fwhm_uev)),
            ("ensemble.overhauser_fwhm_mhz", f(self.ensemble.overhauser_fwhm_mhz)),
            ("ensemble.n_samples", n(self.ensemble.n_samples)),
            ("ensemble.spectral_average", Value::Boolean(self.ensemble.spectral_average)),
            ("detector.jitter_ps", f(self.detector.jitter_ps)),
            ("detector.efficiency", f(self.detector.efficiency)),
            ("detector.bin_ps", f(self.detector.bin_ps)),
            ("homodyne.lo_ratio", f(self.homodyne.lo_ratio)),
            ("homodyne.phi_lo", list(&self.homodyne.phi_lo)),
            ("homodyne.phase_noise_rad", f(self.homodyne.phase_noise_rad)),
            ("homodyne.uniform_phases", n(self.homodyne.uniform_phases)),
            ("grid.tau_max_ns", f(self.grid.tau_max_ns)),
            ("grid.n_points", n(self.grid.n_points)),
            ("grid.delta_scan_over_gamma", list(&self.grid.delta_scan_over_gamma)),
            ("grid.spectrum_window_over_gamma", f(self.grid.spectrum_window_over_gamma)),
            ("visibility.v0", f(self.v0)),
            ("trajectories.count", n(self.trajectories.count)),
            ("trajectories.duration_ns", f(self.trajectories.duration_ns)),
            ("trajectories.dt_ns", f(self.trajectories.dt_ns)),
            (
                "trajectories.detection",
                s(match self.trajectories.detection {
                    DetectionMode::Hbt => "hbt",
                    DetectionMode::Homodyne => "homodyne",
                }),
            ),
            ("trajectories.tau_max_ns", f(self.trajectories.tau_max_ns)),
            ("trajectories.bin_ps", f(self.trajectories.bin_ps)),
            ("output.dir", s(&self.output.dir.to_string_lossy())),
            (
                "output.format",
                s(match self.output.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }),
            ),
            (
                "output.units",
                s(match self.output.units {
                    Units::Auto => "auto",
                    Units::Si => "si",
                    Units::Gamma => "gamma",
                }),
            ),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("model.t2_star_ns", self.model.t2_star_ns),
            ("model.gamma_opt_deph_over_gamma", self.model.gamma_opt_deph_over_gamma),
            ("ensemble.spectral_fwhm_uev", self.ensemble.spectral_fwhm_uev),
            ("ensemble.overhauser_fwhm_mhz", self.ensemble.overhauser_fwhm_mhz),
            ("detector.jitter_ps", self.detector.jitter_ps),
            ("homodyne.phase_noise_rad", self.homodyne.phase_noise_rad),
            ("grid.tau_max_ns", self.grid.tau_max_ns),
            ("trajectories.dt_ns", self.trajectories.dt_ns),
        ];
        for (k, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{k} must be finite and >= 0, got {v}")));
            }
        }
        let positive = [
            ("homodyne.lo_ratio", self.homodyne.lo_ratio),
            ("detector.bin_ps", self.detector.bin_ps),
            ("grid.spectrum_window_over_gamma", self.grid.spectrum_window_over_gamma),
            ("trajectories.duration_ns", self.trajectories.duration_ns),
            ("trajectories.tau_max_ns", self.trajectories.tau_max_ns),
            ("trajectories.bin_ps", self.trajectories.bin_ps),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{k} must be finite and > 0, got {v}")));
            }
        }
        if !(self.v0 > 0.0 && self.v0 <= 1.0) {
            return Err(CliError::Config(format!("visibility.v0 must lie in (0, 1], got {}", self.v0)));
        }
        if self.homodyne.phi_lo.is_empty() && self.homodyne.uniform_phases == 0 {
            return Err(CliError::Config("homodyne needs at least one phase or uniform_phases > 0".into()));
        }
        if self.grid.delta_scan_over_gamma.is_empty() {
            return Err(CliError::Config("grid.delta_scan_over_gamma must not be empty".into()));
        }
        if self.trajectories.count == 0 {
            return Err(CliError::Config("trajectories.count must be >= 1".into()));
        }
        if self.model.spin_dephasing == DephasingModel::Quasistatic && self.model.t2_star_ns == 0.0 && self.ensemble.overhauser_fwhm_mhz == 0.0 {
            return Err(CliError::Config("quasistatic dephasing needs model.t2_star_ns or ensemble.overhauser_fwhm_mhz".into()));
        }
        self.physical.validate()?;
        self.cavity_params().validate()?;
        self.detector_model().validate()?;
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        1.0 / self.physical.t1
    }

    /// Model parameters with the spin dephasing resolved (calibrated when
    /// requested). Quasistatic runs carry no Lindblad spin dephasing; the
    /// Overhauser average supplies it.
    pub fn params(&self) -> Result<TrionParams> {
        let gamma = self.gamma();
        let rate = if self.model.t2_star_ns > 0.0 {
            1.0 / self.model.t2_star_ns
        } else {
            0.0
        };
        let overrides = ParamOverrides {
            larmor: Some(mhz_to_rad_per_ns(self.model.larmor_mhz)),
            hole_larmor: Some(mhz_to_rad_per_ns(self.model.hole_larmor_mhz)),
            delta: Some(mhz_to_rad_per_ns(self.model.delta_mhz)),
            omega_rabi: None,
            gamma_opt_deph: Some(self.model.gamma_opt_deph_over_gamma * gamma),
            spin_dephasing: Some(SpinDephasing::Markovian {
                rate: match self.model.spin_dephasing {
                    DephasingModel::Markovian => rate,
                    DephasingModel::Quasistatic => 0.0,
                },
            }),
        };
        let p = from_physical(&self.physical, &overrides)?;
        if self.model.spin_dephasing == DephasingModel::Markovian && self.model.calibrate_t2 && rate > 0.0 {
            let rate = calibrate_spin_dephasing(&p, self.model.t2_star_ns)?;
            return Ok(TrionParams {
                spin_dephasing: SpinDephasing::Markovian { rate },
                ..p
            });
        }
        Ok(p)
    }

    pub fn cavity_params(&self) -> CavityParams {
        CavityParams {
            kappa: ghz_to_rad_per_ns(self.cavity.kappa_ghz),
            kappa_ext: ghz_to_rad_per_ns(self.cavity.kappa_ext_ghz),
            g_coupling: ghz_to_rad_per_ns(self.cavity.g_ghz),
            gamma_x: ghz_to_rad_per_ns(self.cavity.gamma_x_ghz),
            delta_c: ghz_to_rad_per_ns(self.cavity.delta_c_ghz),
        }
    }

    pub fn detector_model(&self) -> DetectorModel {
        DetectorModel {
            jitter_sigma: self.detector.jitter_ps * 1e-3,
            efficiency: self.detector.efficiency,
            bin_width: self.detector.bin_ps * 1e-3,
        }
    }

    /// Spectral (detuning) jitter with the node count resolved against Γ.
    pub fn spectral_jitter(&self) -> Result<JitterModel> {
        let fwhm = uev_to_rad_per_ns(self.ensemble.spectral_fwhm_uev);
        let required = (8.0 * fwhm / self.gamma()).ceil() as usize;
        let n = match self.ensemble.n_samples {
            0 => JitterModel::DEFAULT_SAMPLES.max(required),
            n => n,
        };
        Ok(JitterModel::new(JitterKind::GaussianDetuning, fwhm, n)?)
    }

    /// Overhauser jitter of the precession frequency. Without an explicit
    /// width, σ = √2/T₂* so that the Gaussian envelope falls to 1/e at T₂*.
    pub fn overhauser_jitter(&self) -> Result<JitterModel> {
        let fwhm = if self.ensemble.overhauser_fwhm_mhz > 0.0 {
            mhz_to_rad_per_ns(self.ensemble.overhauser_fwhm_mhz)
        } else {
            std::f64::consts::SQRT_2 / self.model.t2_star_ns / fwhm_to_sigma(1.0)
        };
        let n = match self.ensemble.n_samples {
            0 => JitterModel::DEFAULT_SAMPLES,
            n => n,
        };
        Ok(JitterModel::new(JitterKind::GaussianOverhauser, fwhm, n)?)
    }

    /// Units for frequency columns of `scenario`.
    pub fn units_for(&self, scenario: &str) -> Units {
        match (self.output.units, scenario) {
            (Units::Auto, "spectrum") => Units::Gamma,
            (Units::Auto, _) => Units::Si,
            (u, _) => u,
        }
    }
}

/// Flattens a TOML document into dotted keys.
pub fn flatten(table: &toml::Table) -> Entries {
    fn walk(prefix: &str, t: &toml::Table, out: &mut Entries) {
        for (k, v) in t {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match v {
                Value::Table(inner) => walk(&key, inner, out),
                other => {
                    out.insert(key, other.clone());
                }
            }
        }
    }
    let mut out = Entries::new();
    walk("", table, &mut out);
    out
}

pub fn parse_toml(text: &str) -> Result<Entries> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    Ok(flatten(&table))
}

/// Reads a configuration file: TOML, or the metadata block of a CSV or JSON
/// result emitted by this tool.
pub fn load(path: &Path) -> Result<Entries> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            let block: String = text
                .lines()
                .filter_map(|l| l.strip_prefix("# "))
                .map(|l| format!("{l}\n"))
                .collect();
            parse_toml(&block)
        }
        Some("json") => {
            let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let meta = doc
                .get("metadata")
                .and_then(|m| m.as_object())
                .ok_or_else(|| CliError::Config(format!("{}: no metadata object", path.display())))?;
            meta.iter().map(|(k, v)| Ok((k.clone(), json_to_toml(k, v)?))).collect()
        }
        _ => parse_toml(&text),
    }
}

fn json_to_toml(key: &str, v: &serde_json::Value) -> Result<Value> {
    use serde_json::Value as J;
    Ok(match v {
        J::Bool(b) => Value::Boolean(*b),
        J::Number(n) => match n.as_i64() {
            Some(i) => Value::Integer(i),
            None => Value::Float(n.as_f64().ok_or_else(|| CliError::Config(format!("{key}: number out of range")))?),
        },
        J::String(s) => Value::String(s.clone()),
        J::Array(xs) => Value::Array(xs.iter().map(|x| json_to_toml(key, x)).collect::<Result<_>>()?),
        J::Null | J::Object(_) => return Err(CliError::Config(format!("{key}: unsupported value {v}"))),
    })
}

pub fn toml_to_json(v: &Value) -> serde_json::Value {
    use serde_json::Value as J;
    match v {
        Value::Boolean(b) => J::Bool(*b),
        Value::Integer(i) => J::from(*i),
        Value::Float(x) => J::from(*x),
        Value::String(s) => J::String(s.clone()),
        Value::Array(xs) => J::Array(xs.iter().map(toml_to_json).collect()),
        Value::Datetime(d) => J::String(d.to_string()),
        Value::Table(t) => J::Object(t.iter().map(|(k, v)| (k.clone(), toml_to_json(v))).collect()),
    }
}

/// Parses an angle such as `0.5`, `pi`, `-pi/2`, `3pi/4` or `0.25*pi`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| format!("bad angle '{s}'"))?),
        None => (t.as_str(), 1.0),
    };
    let coef = match num.strip_suffix("pi").map(|c| c.trim_end_matches('*')) {
        Some("") | Some("+") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.parse::<f64>().map_err(|_| format!("bad angle '{s}'"))?,
        None => return Err(format!("bad angle '{s}'")),
    };
    Ok(coef * PI / den)
}

pub fn parse_format(s: &str) -> Result<Format> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        s => Err(bad_choice("output.format", s, "csv, json")),
    }
}

pub fn parse_units(s: &str) -> Result<Units> {
    match s {
        "auto" => Ok(Units::Auto),
        "si" => Ok(Units::Si),
        "gamma" => Ok(Units::Gamma),
        s => Err(bad_choice("output.units", s, "auto, si, gamma")),
    }
}

fn bad_choice(key: &str, got: &str, choices: &str) -> CliError {
    CliError::Config(format!("{key}: '{got}' is not one of {choices}"))
}

fn type_error(key: &str, want: &str, v: &Value) -> CliError {
    CliError::Config(format!("{key}: expected {want}, got {v}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number", v)),
    }
}

fn as_int(key: &str, v: &Value) -> Result<i64> {
    v.as_integer().ok_or_else(|| type_error(key, "an integer", v))
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    let i = as_int(key, v)?;
    usize::try_from(i).map_err(|_| type_error(key, "a non-negative integer", v))
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_error(key, "true or false", v))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a string", v))
}

fn as_f64_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(xs) => xs.iter().map(|x| as_f64(key, x)).collect(),
        _ => Err(type_error(key, "a list of numbers", v)),
    }
}

fn as_angles(key: &str, v: &Value) -> Result<Vec<f64>> {
    let one = |x: &Value| match x {
        Value::String(s) => parse_angle(s).map_err(|e| CliError::Config(format!("{key}: {e}"))),
        other => as_f64(key, other),
    };
    match v {
        Value::Array(xs) => xs.iter().map(one).collect(),
        other => Ok(vec![one(other)?]),
    }
}
