// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Library results checked against independent calculations: explicit
//! integration, closed forms and hand-rolled averages.

use std::f64::consts::PI;

use spinmod_core::dynamics::{spectrum, CorrelationKind, CorrelationSeries, HomodyneConfig, ScatteringModel, TauGrid};
use spinmod_core::ensemble::{
    average_over_detuning, average_over_overhauser, convolve_detector_jitter, DetectorModel, JitterKind, JitterModel, Observable,
};
use spinmod_core::presets::QD1;
use spinmod_core::qsys::{liouvillian, propagate, steady_state, ComplexMatrix, DensityMatrix, Tolerances};
use spinmod_core::trion::{build_collapse_ops, build_hamiltonian, two_level_reduction, SpinDephasing, TrionParams};
use spinmod_core::units::fwhm_to_sigma;
use spinmod_core::C64;

fn qd1() -> TrionParams {
    QD1.params().unwrap()
}

#[test]
fn propagation_agrees_with_fine_euler_steps() {
    let p = qd1();
    let l = liouvillian(&build_hamiltonian(&p), &build_collapse_ops(&p)).unwrap();
    let rho0 = DensityMatrix::basis(4, 0);
    let t = 2.0;
    let dt = 1e-4 / p.gamma;
    let steps = (t / dt).round() as usize;
    let dt = t / steps as f64;
    let mut x = rho0.matrix().clone();
    for _ in 0..steps {
        let dx = l.apply(&x).scale_re(dt);
        x = &x + &dx;
    }
    let exact = propagate(&l, &rho0, t).unwrap();
    let err = exact.matrix().max_abs_diff(&x);
    assert!(err < 1e-3, "Euler vs propagator: {err:e}");
}

#[test]
fn steady_state_is_the_long_time_limit() {
    let p = qd1();
    let l = liouvillian(&build_hamiltonian(&p), &build_collapse_ops(&p)).unwrap();
    let ss = steady_state(&l).unwrap();
    let late = propagate(&l, &DensityMatrix::basis(4, 1), 400.0).unwrap();
    assert!(ss.matrix().max_abs_diff(late.matrix()) < 1e-6);
    assert!(l.apply(ss.matrix()).max_abs() < 1e-9);
}

#[test]
fn resonance_fluorescence_g2_matches_closed_form() {
    let gamma = 1.0;
    let omega = 1.3;
    let p = TrionParams {
        gamma,
        omega_b: 0.0,
        omega_h: 0.0,
        delta: 0.0,
        omega_rabi: omega,
        gamma_opt_deph: 0.0,
        spin_dephasing: SpinDephasing::Markovian { rate: 0.0 },
    };
    let r = two_level_reduction(&p);
    let model = ScatteringModel::from_parts(&r.hamiltonian, &r.collapse_ops, r.field, Tolerances::DEFAULT).unwrap();
    let grid = TauGrid::new(12.0, 1201).unwrap();
    let g2 = model.raw_g2(&grid).unwrap().normalize().unwrap();
    let mu = (omega * omega - gamma * gamma / 16.0).sqrt();
    for (tau, v) in grid.taus().iter().zip(&g2.values) {
        let expected = 1.0 - (-0.75 * gamma * tau).exp() * ((mu * tau).cos() + 0.75 * gamma / mu * (mu * tau).sin());
        assert!((v.re - expected).abs() < 1e-6, "tau {tau}: {} vs {expected}", v.re);
        assert!(v.im.abs() < 1e-9);
    }
}

fn exponential_g1(gamma: f64, omega0: f64, grid: TauGrid) -> CorrelationSeries {
    CorrelationSeries {
        grid,
        values: grid.taus().iter().map(|&t| C64::from_polar((-gamma * t).exp(), omega0 * t)).collect(),
        kind: CorrelationKind::RawG1,
        normalization: 1.0,
    }
}

#[test]
fn exponential_coherence_gives_a_lorentzian_line() {
    let (gamma, omega0) = (1.0, 0.5);
    let grid = TauGrid::with_step(0.005, 16_384).unwrap();
    let s = spectrum(&exponential_g1(gamma, omega0, grid), 40.0).unwrap();
    let peak = 1.0 / (PI * gamma);
    for (w, v) in s.omega_grid.iter().zip(&s.values) {
        if (w - omega0).abs() > 20.0 {
            continue;
        }
        let expected = gamma / (PI * (gamma * gamma + (w - omega0).powi(2)));
        assert!((v - expected).abs() < 1e-3 * peak, "omega {w}: {v} vs {expected}");
    }
    assert!((s.centroid() - omega0).abs() < 0.05);
}

#[test]
fn spectrum_integrates_to_zero_lag_coherence() {
    let grid = TauGrid::with_step(0.01, 3000).unwrap();
    let mut g1 = exponential_g1(0.7, -1.1, grid);
    for v in &mut g1.values {
        *v *= 2.5;
    }
    let s = spectrum(&g1, 1.0).unwrap();
    assert!((s.integral() - 2.5).abs() < 1e-9, "{}", s.integral());

    let p = qd1();
    let model = ScatteringModel::new(&p).unwrap();
    let g1 = model.raw_g1(&TauGrid::covering(&p, 30.0, 4096)).unwrap();
    let s = spectrum(&g1, 20.0).unwrap();
    assert!((s.integral() - model.intensity()).abs() < 1e-9 * model.intensity().max(1.0));
}

#[test]
fn gaussian_overhauser_envelope() {
    let t2 = QD1.t2_star;
    let j = JitterModel::new(JitterKind::GaussianOverhauser, 4.0 * (2.0f64.ln()).sqrt() / t2, 41).unwrap();
    assert!((j.sigma() - 2.0f64.sqrt() / t2).abs() < 1e-12);
    // Envelope of an averaged free precession, fitted as ln E = -t²/T² by least squares.
    let ts: Vec<f64> = (1..=40).map(|k| 0.1 * k as f64).collect();
    let env: Vec<f64> = ts
        .iter()
        .map(|&t| j.nodes().iter().map(|(d, w)| w * (d * t).cos()).sum::<f64>())
        .collect();
    let x: Vec<f64> = ts.iter().map(|t| t * t).collect();
    let y: Vec<f64> = env.iter().map(|e| e.ln()).collect();
    let slope = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = x.iter().zip(&y).map(|(a, b)| (b - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - mean).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    let one_over_e = (-1.0 / slope).sqrt();
    assert!(r2 > 0.999, "R² = {r2}");
    assert!((one_over_e - 2.7).abs() < 0.1, "1/e time {one_over_e}");
}

#[test]
fn overhauser_average_matches_dense_riemann_sum() {
    let p = TrionParams {
        spin_dephasing: SpinDephasing::Markovian { rate: 0.0 },
        ..qd1()
    };
    let fwhm = 4.0 * (2.0f64.ln()).sqrt() / QD1.t2_star;
    let j = JitterModel::new(JitterKind::GaussianOverhauser, fwhm, 21).unwrap();
    let grid = TauGrid::covering(&p, 6.0, 200);
    let lib = average_over_overhauser(&p, &j, &Observable::G1, &grid).unwrap().correlation().unwrap();

    let sigma = fwhm_to_sigma(fwhm);
    let n = 121;
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    let mut intensity = 0.0;
    let mut wsum = 0.0;
    for k in 0..n {
        let d = -6.0 * sigma + 12.0 * sigma * k as f64 / (n - 1) as f64;
        let w = (-0.5 * (d / sigma).powi(2)).exp();
        let member = TrionParams {
            omega_b: p.omega_b + d / 2.0,
            ..p
        };
        let g = ScatteringModel::new(&member).unwrap().raw_g1(&grid).unwrap();
        for (a, v) in acc.iter_mut().zip(&g.values) {
            *a += v * w;
        }
        intensity += w * g.normalization;
        wsum += w;
    }
    for (a, l) in acc.iter().zip(&lib.values) {
        let reference = a / intensity;
        assert!((reference - l).norm() < 1e-6, "{reference} vs {l}");
    }
    assert!(wsum > 0.0);
}

#[test]
fn detector_jitter_preserves_area_and_widens_a_spike() {
    let p = qd1();
    let grid = TauGrid::covering(&p, 60.0, 4096);
    let g2 = ScatteringModel::new(&p).unwrap().raw_g2(&grid).unwrap().normalize().unwrap();
    let det = DetectorModel {
        jitter_sigma: 0.064,
        efficiency: 1.0,
        bin_width: 0.0,
    };
    let conv = convolve_detector_jitter(&g2, &det).unwrap();
    let area = |s: &CorrelationSeries| s.values.iter().map(|v| v.re - 1.0).sum::<f64>() * grid.step();
    let (before, after) = (area(&g2), area(&conv));
    assert!((before - after).abs() <= 0.01 * before.abs(), "{before} vs {after}");

    let fine = TauGrid::with_step(0.002, 400).unwrap();
    let mut spike = vec![C64::new(0.0, 0.0); fine.len()];
    spike[0] = C64::new(1.0, 0.0);
    let series = CorrelationSeries {
        grid: fine,
        values: spike,
        kind: CorrelationKind::G2,
        normalization: 1.0,
    };
    let out = convolve_detector_jitter(&series, &det).unwrap();
    let (mut m0, mut m2) = (out.values[0].re, 0.0);
    for (i, v) in out.values.iter().enumerate().skip(1) {
        m0 += 2.0 * v.re;
        m2 += 2.0 * fine.tau(i).powi(2) * v.re;
    }
    let width = (m2 / m0).sqrt();
    let expected = 2.0f64.sqrt() * det.jitter_sigma;
    assert!((width - expected).abs() < 0.01 * expected, "{width} vs {expected}");
}

#[test]
fn spectral_average_baseline_is_the_intensity_moment_ratio() {
    let p = qd1();
    let grid = TauGrid::covering(&p, 3000.0, 1024);
    let last = grid.len() - 1;

    let single = JitterModel::new(JitterKind::GaussianDetuning, 0.0, 3).unwrap();
    let g2 = average_over_detuning(&p, &single, &Observable::G2, &grid).unwrap().correlation().unwrap();
    assert!((g2.values[last].re - 1.0).abs() < 1e-3);

    // Detuned members stay bunched for hundreds of ns (slow optical pumping
    // between the field-axis spin states), hence the long window.
    let j = JitterModel::new(JitterKind::GaussianDetuning, 3.0, 15).unwrap();
    let avg = average_over_detuning(&p, &j, &Observable::G2, &grid).unwrap().correlation().unwrap();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (d, w) in j.nodes() {
        let model = ScatteringModel::new(&p.with_delta(d)).unwrap();
        let i = model.intensity();
        if w > 1e-4 {
            let g = model.raw_g2(&grid).unwrap().normalize().unwrap();
            assert!((g.values[last].re - 1.0).abs() < 1e-3, "member at {d} not relaxed: {}", g.values[last].re);
        }
        m1 += w * i;
        m2 += w * i * i;
    }
    let expected = m2 / (m1 * m1);
    assert!(expected > 1.0);
    assert!((avg.values[last].re - expected).abs() < 1e-3 * expected, "{} vs {expected}", avg.values[last].re);
}

#[test]
fn homodyne_correlation_has_no_lo_harmonics_above_second() {
    let p = qd1();
    let model = ScatteringModel::new(&p).unwrap();
    let grid = TauGrid::covering(&p, 5.0, 64);
    let alpha = (10.0 * model.intensity()).sqrt();
    let n = 8;
    let series: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let h = HomodyneConfig {
                alpha,
                phi_lo: 2.0 * PI * k as f64 / n as f64,
                phase_noise_sigma: 0.0,
            };
            model.raw_g2_hom(&grid, &h).unwrap().values
        })
        .collect();
    let scale = series.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    for i in 0..grid.len() {
        for harmonic in [3, 4] {
            let c: C64 = (0..n)
                .map(|k| series[k][i] * C64::from_polar(1.0, -2.0 * PI * (harmonic * k) as f64 / n as f64))
                .sum();
            assert!(c.norm() < 1e-9 * scale, "harmonic {harmonic} at {i}: {}", c.norm());
        }
    }
    // A degree-2 trigonometric polynomial is averaged exactly by five phases.
    let u5 = model.raw_g2_hom_uniform(&grid, alpha, 5).unwrap();
    let u8 = model.raw_g2_hom_uniform(&grid, alpha, 8).unwrap();
    for (a, b) in u5.values.iter().zip(&u8.values) {
        assert!((a - b).norm() < 1e-9 * scale);
    }
    assert!((u5.normalization - u8.normalization).abs() < 1e-9 * u8.normalization);
}

#[test]
fn strong_local_oscillator_is_poissonian() {
    let p = qd1();
    let model = ScatteringModel::new(&p).unwrap();
    let grid = TauGrid::covering(&p, 5.0, 64);
    let h = HomodyneConfig::from_intensity_ratio(1e6, model.intensity(), 0.3);
    let g = model.raw_g2_hom(&grid, &h).unwrap().normalize().unwrap();
    for v in &g.values {
        assert!((v.re - 1.0).abs() < 1e-2, "{v}");
    }
}

#[test]
fn hamiltonian_is_hermitian_for_the_presets() {
    for p in [qd1(), spinmod_core::presets::QD2.params().unwrap()] {
        let h: ComplexMatrix = build_hamiltonian(&p);
        assert!(h.hermiticity_defect() < 1e-15);
    }
}

#[test]
fn spin_beat_in_homodyne_scales_as_cosine_squared() {
    let p = qd1();
    let model = ScatteringModel::new(&p).unwrap();
    let grid = TauGrid::covering(&p, 6.0, 256);
    let g = |phi: f64| {
        let h = HomodyneConfig::from_intensity_ratio(10.0, model.intensity(), phi);
        model.raw_g2_hom(&grid, &h).unwrap().normalize().unwrap().real()
    };
    let flat = g(PI / 2.0);
    let reference = g(0.0);
    let tail: Vec<usize> = (0..grid.len()).filter(|&i| grid.tau(i) >= 5.0 / p.gamma).collect();
    for phi in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let y = g(phi);
        let (mut num, mut den) = (0.0, 0.0);
        for &i in &tail {
            let (a, b) = (y[i] - flat[i], reference[i] - flat[i]);
            num += a * b;
            den += b * b;
        }
        let ratio = num / den;
        assert!((ratio - phi.cos().powi(2)).abs() < 0.01, "phi {phi}: {ratio} vs {}", phi.cos().powi(2));
    }
}
