// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Curve analysis for simulated observables: oscillation fits, peak finding,
//! dominant frequencies.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::fft::fft_in_place;
use crate::{Error, Result, C64};

/// Downhill-simplex minimization of `f` starting at `x0` with initial
/// simplex offsets `step`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: &[f64], max_iter: usize, ftol: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(core::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let (best, worst) = (values[0], values[n]);
        if (worst - best).abs() <= ftol * (best.abs() + worst.abs() + 1e-300) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = best.iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let (i, v) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    (simplex[i].clone(), v)
}

/// Linear least squares `min ‖Σ c_k b_k − y‖²` via normal equations.
fn linear_lsq(basis: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = basis.len();
    let a = nalgebra::DMatrix::from_fn(k, k, |i, j| basis[i].iter().zip(&basis[j]).map(|(p, q)| p * q).sum::<f64>());
    let b = nalgebra::DVector::from_fn(k, |i, _| basis[i].iter().zip(y).map(|(p, q)| p * q).sum::<f64>());
    let c = a.lu().solve(&b)?;
    let mut rss = 0.0;
    for (t, yt) in y.iter().enumerate() {
        let model: f64 = (0..k).map(|i| c[i] * basis[i][t]).sum();
        rss += (model - yt).powi(2);
    }
    Some((c.iter().copied().collect(), rss))
}

/// Result of [`fit_damped_cosine`]:
/// `y ≈ c0 + e^{-t/T}(c1 + a cos ωt + b sin ωt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedCosineFit {
    /// Angular frequency ω, rad/ns.
    pub omega: f64,
    /// Envelope decay time T, ns.
    pub decay_time: f64,
    pub offset: f64,
    pub decaying_offset: f64,
    /// Oscillation amplitude `√(a² + b²)`.
    pub amplitude: f64,
    pub r_squared: f64,
}

/// Fits a damped cosine with free offsets by variable projection over
/// (ω, T), starting from the given guesses.
pub fn fit_damped_cosine(t: &[f64], y: &[f64], omega_guess: f64, decay_guess: f64) -> Result<DampedCosineFit> {
    if t.len() != y.len() || t.len() < 8 {
        return Err(Error::FitFailed("need at least 8 matching samples"));
    }
    let basis_for = |omega: f64, decay: f64| -> Vec<Vec<f64>> {
        let env: Vec<f64> = t.iter().map(|&s| (-s / decay).exp()).collect();
        vec![
            vec![1.0; t.len()],
            env.clone(),
            t.iter().zip(&env).map(|(&s, e)| e * (omega * s).cos()).collect(),
            t.iter().zip(&env).map(|(&s, e)| e * (omega * s).sin()).collect(),
        ]
    };
    let objective = |x: &[f64]| -> f64 {
        let (omega, decay) = (x[0], x[1].exp());
        linear_lsq(&basis_for(omega, decay), y).map_or(f64::INFINITY, |(_, rss)| rss)
    };
    let x0 = [omega_guess, decay_guess.ln()];
    let (x, _) = nelder_mead(objective, &x0, &[0.05 * omega_guess.abs().max(1e-3), 0.2], 2000, 1e-14);
    // Restart once from the optimum to escape a collapsed simplex.
    let (x, _) = nelder_mead(objective, &x, &[0.01 * x[0].abs().max(1e-3), 0.05], 2000, 1e-15);
    let (omega, decay) = (x[0], x[1].exp());
    let (c, rss) = linear_lsq(&basis_for(omega, decay), y).ok_or(Error::FitFailed("singular least-squares system"))?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(DampedCosineFit {
        omega: omega.abs(),
        decay_time: decay,
        offset: c[0],
        decaying_offset: c[1],
        amplitude: (c[2] * c[2] + c[3] * c[3]).sqrt(),
        r_squared: 1.0 - rss / tss,
    })
}

/// Envelope fit of a visibility-type curve `|g1(τ)| ≈ e^{-τ/T}|cos(ωτ/2)|`.
///
/// The squared curve is a smooth damped cosine at frequency ω with decay time
/// T/2, which avoids fitting the cusps of the absolute value. The returned fit
/// reports ω and T of the original curve.
pub fn fit_visibility(t: &[f64], abs_g1: &[f64], omega_guess: f64, decay_guess: f64) -> Result<DampedCosineFit> {
    let sq: Vec<f64> = abs_g1.iter().map(|v| v * v).collect();
    let fit = fit_damped_cosine(t, &sq, omega_guess, decay_guess / 2.0)?;
    Ok(DampedCosineFit {
        decay_time: 2.0 * fit.decay_time,
        ..fit
    })
}

/// Angular frequency of the strongest spectral component of a uniformly
/// sampled real signal (mean removed), refined by parabolic interpolation.
pub fn dominant_frequency(step: f64, y: &[f64]) -> Result<f64> {
    if y.len() < 4 || !(step > 0.0) {
        return Err(Error::FitFailed("signal too short for a frequency estimate"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let n = (y.len() * 8).next_power_of_two();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for (b, v) in buf.iter_mut().zip(y) {
        *b = C64::new(v - mean, 0.0);
    }
    fft_in_place(&mut buf);
    let power: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm_sqr()).collect();
    let k = (1..power.len() - 1)
        .max_by(|&a, &b| power[a].partial_cmp(&power[b]).unwrap_or(core::cmp::Ordering::Equal))
        .ok_or(Error::FitFailed("no spectral peak"))?;
    let (a, b, c) = (power[k - 1].sqrt(), power[k].sqrt(), power[k + 1].sqrt());
    let denom = a - 2.0 * b + c;
    let shift = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    Ok(2.0 * PI * (k as f64 + shift) / (n as f64 * step))
}

/// Indices of strict local maxima whose value exceeds `min_rel_height` times
/// the global maximum.
pub fn find_peaks(y: &[f64], min_rel_height: f64) -> Vec<usize> {
    let top = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= min_rel_height * top)
        .collect()
}

/// Full width at half maximum of the peak at `idx`, by linear interpolation
/// of the half-height crossings. `None` if a crossing is off the grid.
pub fn peak_fwhm(x: &[f64], y: &[f64], idx: usize) -> Option<f64> {
    let half = y[idx] / 2.0;
    let mut lo = idx;
    while lo > 0 && y[lo] > half {
        lo -= 1;
    }
    let mut hi = idx;
    while hi + 1 < y.len() && y[hi] > half {
        hi += 1;
    }
    if y[lo] > half || y[hi] > half {
        return None;
    }
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    Some(cross(hi - 1, hi) - cross(lo, lo + 1))
}

/// Lorentzian `A/(1 + ((x − x0)/w)²) + c` fitted to the samples within
/// `window` of the peak at `idx`. Returns `(x0, w, A)`; `w` is the half width.
pub fn fit_lorentzian(x: &[f64], y: &[f64], idx: usize, window: f64) -> Result<(f64, f64, f64)> {
    let sel: Vec<usize> = (0..x.len()).filter(|&i| (x[i] - x[idx]).abs() <= window).collect();
    if sel.len() < 5 {
        return Err(Error::FitFailed("too few samples in Lorentzian window"));
    }
    let xs: Vec<f64> = sel.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = sel.iter().map(|&i| y[i]).collect();
    let w0 = peak_fwhm(x, y, idx).unwrap_or(window) / 2.0;
    let objective = |p: &[f64]| -> f64 {
        let (x0, w) = (p[0], p[1].exp());
        let shape: Vec<f64> = xs.iter().map(|&v| 1.0 / (1.0 + ((v - x0) / w).powi(2))).collect();
        linear_lsq(&[shape, vec![1.0; xs.len()]], &ys).map_or(f64::INFINITY, |(_, rss)| rss)
    };
    let (p, _) = nelder_mead(objective, &[x[idx], w0.max(1e-9).ln()], &[0.2 * w0, 0.2], 2000, 1e-14);
    let (x0, w) = (p[0], p[1].exp());
    let shape: Vec<f64> = xs.iter().map(|&v| 1.0 / (1.0 + ((v - x0) / w).powi(2))).collect();
    let (c, _) = linear_lsq(&[shape, vec![1.0; xs.len()]], &ys).ok_or(Error::FitFailed("singular Lorentzian fit"))?;
    Ok((x0, w, c[0]))
}

/// Two Lorentzians plus a constant fitted jointly to the samples within
/// `window` of either starting centre. Returns `(x0, w, A)` per peak (half
/// widths), in the order of the guesses.
pub fn fit_lorentzian_pair(x: &[f64], y: &[f64], centres: [f64; 2], half_width: f64, window: f64) -> Result<[(f64, f64, f64); 2]> {
    let sel: Vec<usize> = (0..x.len())
        .filter(|&i| centres.iter().any(|c| (x[i] - c).abs() <= window))
        .collect();
    if sel.len() < 8 {
        return Err(Error::FitFailed("too few samples in Lorentzian pair window"));
    }
    let xs: Vec<f64> = sel.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = sel.iter().map(|&i| y[i]).collect();
    let basis = |p: &[f64]| -> Vec<Vec<f64>> {
        let shape = |x0: f64, w: f64| -> Vec<f64> { xs.iter().map(|&v| 1.0 / (1.0 + ((v - x0) / w).powi(2))).collect() };
        vec![shape(p[0], p[1].exp()), shape(p[2], p[3].exp()), vec![1.0; xs.len()]]
    };
    let objective = |p: &[f64]| linear_lsq(&basis(p), &ys).map_or(f64::INFINITY, |(_, rss)| rss);
    let w0 = half_width.max(1e-9);
    let x0 = [centres[0], w0.ln(), centres[1], w0.ln()];
    let (p, _) = nelder_mead(objective, &x0, &[0.2 * w0, 0.2, 0.2 * w0, 0.2], 4000, 1e-16);
    let (p, _) = nelder_mead(objective, &p, &[0.05 * w0, 0.05, 0.05 * w0, 0.05], 4000, 1e-17);
    let (c, _) = linear_lsq(&basis(&p), &ys).ok_or(Error::FitFailed("singular Lorentzian pair fit"))?;
    Ok([(p[0], p[1].exp(), c[0]), (p[2], p[3].exp(), c[1])])
}

/// One spectral pole: `a·w²/(w² + (x − x0)²) + b·w(x − x0)/(w² + (x − x0)²)`,
/// the real part of a complex-residue Lorentzian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub centre: f64,
    pub half_width: f64,
    pub absorptive: f64,
    pub dispersive: f64,
}

/// Fits a sum of poles plus a constant, starting from `(centre, half_width)`
/// guesses. The spectrum of a Markovian system has exactly this form, so the
/// fitted centres are the oscillation frequencies of its decay modes.
pub fn fit_poles(x: &[f64], y: &[f64], guesses: &[(f64, f64)]) -> Result<Vec<Pole>> {
    let k = guesses.len();
    if k == 0 || x.len() != y.len() || x.len() < 3 * k + 2 {
        return Err(Error::FitFailed("too few samples for the pole model"));
    }
    let basis = |p: &[f64]| -> Vec<Vec<f64>> {
        let mut b = Vec::with_capacity(2 * k + 1);
        for j in 0..k {
            let (x0, w) = (p[2 * j], p[2 * j + 1].exp());
            b.push(x.iter().map(|&v| w * w / (w * w + (v - x0).powi(2))).collect());
            b.push(x.iter().map(|&v| w * (v - x0) / (w * w + (v - x0).powi(2))).collect());
        }
        b.push(vec![1.0; x.len()]);
        b
    };
    let objective = |p: &[f64]| linear_lsq(&basis(p), y).map_or(f64::INFINITY, |(_, rss)| rss);
    let mut p: Vec<f64> = guesses.iter().flat_map(|&(c, w)| [c, w.max(1e-9).ln()]).collect();
    for scale in [0.3, 0.1, 0.03] {
        let step: Vec<f64> = guesses.iter().flat_map(|&(_, w)| [scale * w, scale]).collect();
        p = nelder_mead(objective, &p, &step, 400 * k * k, 1e-18).0;
    }
    let (c, _) = linear_lsq(&basis(&p), y).ok_or(Error::FitFailed("singular pole fit"))?;
    Ok((0..k)
        .map(|j| Pole {
            centre: p[2 * j],
            half_width: p[2 * j + 1].exp(),
            absorptive: c[2 * j],
            dispersive: c[2 * j + 1],
        })
        .collect())
}

/// Least-squares polynomial of degree `deg`; returns coefficients (constant
/// first) and the coefficient of determination.
pub fn polyfit(x: &[f64], y: &[f64], deg: usize) -> Result<(Vec<f64>, f64)> {
    let basis: Vec<Vec<f64>> = (0..=deg).map(|k| x.iter().map(|v| v.powi(k as i32)).collect()).collect();
    let (c, rss) = linear_lsq(&basis, y).ok_or(Error::FitFailed("singular polynomial fit"))?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    Ok((c, 1.0 - rss / tss))
}
