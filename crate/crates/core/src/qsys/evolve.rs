// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use super::{ComplexMatrix, DensityMatrix, Superoperator, Tolerances};
use crate::{Error, Result, C64};

/// One classical fourth-order Runge–Kutta step of `dx/dt = A x`, as a matrix.
///
/// For a linear autonomous system RK4 reduces to the degree-4 Taylor
/// polynomial of `exp(hA)`.
fn rk4_step_matrix(a: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let ha = a * C64::new(h, 0.0);
    let mut acc = &id + &ha * C64::new(0.25, 0.0);
    acc = &id + &ha * &acc * C64::new(1.0 / 3.0, 0.0);
    acc = &id + &ha * &acc * C64::new(0.5, 0.0);
    &id + &ha * &acc
}

fn matrix_power(base: &DMatrix<C64>, mut n: u64) -> DMatrix<C64> {
    let dim = base.nrows();
    let mut result = DMatrix::<C64>::identity(dim, dim);
    let mut b = base.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &b;
        }
        n >>= 1;
        if n > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// Intended for the small (≤ 16) matrices used here; accurate to rounding.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * C64::new(scale, 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let mut term = id.clone();
    let mut sum = id;
    for k in 1..=18 {
        term = &term * &x * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Fixed-interval evolution operator `e^{L Δt}` realised by RK4 sub-steps.
///
/// The sub-step is at most `step_fraction / rate_bound(L)`; the interval is
/// split into equal sub-steps and the resulting step matrix is raised to the
/// required power.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    interval: f64,
    substeps: u64,
    map: DMatrix<C64>,
}

impl Propagator {
    pub fn new(l: &Superoperator, interval: f64) -> Result<Self> {
        Self::with_tolerances(l, interval, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(l: &Superoperator, interval: f64, tol: &Tolerances) -> Result<Self> {
        if !(interval >= 0.0) {
            return Err(Error::NegativeTime(interval));
        }
        let n = l.dim() * l.dim();
        if interval == 0.0 {
            return Ok(Self {
                dim: l.dim(),
                interval,
                substeps: 0,
                map: DMatrix::identity(n, n),
            });
        }
        let rate = l.rate_bound();
        let max_step = if rate > 0.0 { tol.step_fraction / rate } else { interval };
        let substeps = (interval / max_step).ceil().max(1.0) as u64;
        let h = interval / substeps as f64;
        let step = rk4_step_matrix(l.action(), h);
        Ok(Self {
            dim: l.dim(),
            interval,
            substeps,
            map: matrix_power(&step, substeps),
        })
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn substeps(&self) -> u64 {
        self.substeps
    }

    /// Evolves an arbitrary operator (not necessarily a state) by one interval.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = DVector::from_column_slice(x.as_inner().as_slice());
        let out = &self.map * v;
        ComplexMatrix::from_inner(DMatrix::from_column_slice(self.dim, self.dim, out.as_slice()))
    }

    /// Evolves a column-stacked operator in place, reusing `scratch`.
    pub fn apply_vec(&self, x: &mut DVector<C64>, scratch: &mut DVector<C64>) {
        self.map.mul_to(x, scratch);
        core::mem::swap(x, scratch);
    }

    pub fn power(&self, n: u64) -> Propagator {
        Propagator {
            dim: self.dim,
            interval: self.interval * n as f64,
            substeps: self.substeps * n,
            map: matrix_power(&self.map, n),
        }
    }
}

/// `ρ(t) = e^{L t} ρ0`.
pub fn propagate(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    propagate_with(l, rho0, t, &Tolerances::DEFAULT)
}

pub fn propagate_with(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t: f64,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let p = Propagator::with_tolerances(l, t, tol)?;
    Ok(DensityMatrix::from_trusted(p.apply(rho0.matrix())))
}

/// The unique fixed point of `L`, normalized to unit trace.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    steady_state_with(l, &Tolerances::DEFAULT)
}

pub fn steady_state_with(l: &Superoperator, tol: &Tolerances) -> Result<DensityMatrix> {
    let d = l.dim();
    let svd = l.action().clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let sv = &svd.singular_values;
    let s_max = sv.iter().copied().fold(0.0, f64::max);
    if s_max == 0.0 {
        return Err(Error::DegenerateSteadyState { multiplicity: d * d });
    }
    let threshold = tol.null_space * s_max;
    let multiplicity = sv.iter().filter(|&&s| s <= threshold).count();
    if multiplicity > 1 {
        return Err(Error::DegenerateSteadyState { multiplicity });
    }
    let k = (0..sv.len())
        .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
        .expect("non-empty spectrum");
    // Right singular vector k is the conjugate of row k of V†.
    let null: alloc::vec::Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    let m = ComplexMatrix::from_vectorized(d, &null)?;
    let tr = m.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::SteadyStateTrace(tr.norm()));
    }
    let rho = m.scale(C64::new(1.0, 0.0) / tr).hermitian_part();
    Ok(DensityMatrix::from_trusted(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsys::liouvillian;
    use approx::assert_abs_diff_eq;

    fn decay(gamma: f64) -> Superoperator {
        let l = ComplexMatrix::ket_bra(2, 0, 1).scale_re(gamma.sqrt());
        liouvillian(&ComplexMatrix::zeros(2), &[l]).unwrap()
    }

    #[test]
    fn zero_time_returns_input_exactly() {
        let rho = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert_eq!(propagate(&decay(1.0), &rho, 0.0).unwrap(), rho);
    }

    #[test]
    fn negative_time_is_rejected() {
        let rho = DensityMatrix::basis(2, 1);
        assert_eq!(propagate(&decay(1.0), &rho, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn exponential_decay_of_excited_population() {
        let gamma = 2.5;
        let rho = propagate(&decay(gamma), &DensityMatrix::basis(2, 1), 1.0 / gamma).unwrap();
        assert_abs_diff_eq!(rho.population(1), (-1.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn decay_only_steady_state_is_ground() {
        let rho = steady_state(&decay(1.0)).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::basis(2, 0).matrix()) < 1e-12);
    }

    #[test]
    fn driven_two_level_steady_state_weak_drive() {
        // Independent analytic population Ω²/(Γ² + 2Ω² + 4Δ²).
        let gamma = 1.0;
        let omega = 0.01 * gamma;
        let h = ComplexMatrix::from_fn(2, |i, j| {
            if i != j {
                C64::new(omega / 2.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let l = liouvillian(&h, &[ComplexMatrix::ket_bra(2, 0, 1).scale_re(gamma.sqrt())]).unwrap();
        let rho = steady_state(&l).unwrap();
        let exact = omega * omega / (gamma * gamma + 2.0 * omega * omega);
        assert!((rho.population(1) - exact).abs() < 0.05 * exact);
        assert!((rho.population(1) - omega * omega / (gamma * gamma)).abs() < 0.05 * exact);
        assert!(l.apply(rho.matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn decoupled_sectors_report_multiplicity() {
        let l = liouvillian(&ComplexMatrix::zeros(2), &[]).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::DegenerateSteadyState { multiplicity: 4 })));
        // Two independent decaying pairs in a four-level space; the dephasing
        // term removes the ground coherences, leaving two stationary populations.
        let mut z = ComplexMatrix::zeros(4);
        z.set(0, 0, C64::new(1.0, 0.0));
        z.set(1, 1, C64::new(-1.0, 0.0));
        let ops = [ComplexMatrix::ket_bra(4, 0, 2), ComplexMatrix::ket_bra(4, 1, 3), z];
        let l = liouvillian(&ComplexMatrix::zeros(4), &ops).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::DegenerateSteadyState { multiplicity: 2 })));
    }

    #[test]
    fn expm_matches_closed_form_rotation() {
        let theta = 0.7;
        let a = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(-theta, 0.0), C64::new(theta, 0.0), C64::new(0.0, 0.0)]);
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)].re, theta.sin(), epsilon = 1e-14);
    }
}
