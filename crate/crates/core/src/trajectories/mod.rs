// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-jump unraveling of the trion master equation and photon
//! time-tag processing.
//!
//! Between jumps a state evolves under `H_eff = H − (i/2)Σ J†J` with the exact
//! one-step propagator on a fixed `dt` grid. A jump happens in the first step
//! after which the squared norm falls below a uniform draw `r`; the step is
//! located by a binary search over precomputed powers `U^(2^k)`, which gives
//! the same jump times as stepping one `dt` at a time. Jump times are
//! therefore multiples of `dt`.
//!
//! Detected channels are built from the port field operators: HBT splits
//! `E_V` equally onto A and B; homodyne mixes it with a c-number LO into
//! `(α'𝟙 ± E_V)/√2`. Together with the undetected `E_H` and dephasing jumps
//! this reproduces the master equation exactly.

mod correlator;
mod stream;

pub use correlator::{correlate, correlate_all_pairs, CoincidenceHistogram};
pub use stream::{stream_statistics, Channel, StreamStatistics, TimeTagStream, PS_PER_NS};

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dynamics::HomodyneConfig;
use crate::ensemble::DetectorModel;
use crate::qsys::{expm, steady_state, liouvillian, ComplexMatrix, DensityMatrix};
use crate::trion::{self, TrionParams};
use crate::{Error, Result, C64};

/// Largest admissible step as a fraction of the inverse fastest rate.
pub const DT_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    /// V port split 50:50 onto detectors A and B.
    Hbt,
    /// V port mixed with a local oscillator on a balanced splitter.
    Homodyne(HomodyneConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    /// Duration of each trajectory, ns. Trajectory `k` fills
    /// `[k·duration, (k+1)·duration)` of the stream.
    pub duration: f64,
    pub dt: f64,
    pub seed: u64,
    pub detection: Detection,
}

impl TrajectoryConfig {
    /// Fastest rate of the unraveling: model rates and the LO click rate α².
    pub fn max_rate(p: &TrionParams, detection: &Detection) -> f64 {
        let lo = match detection {
            Detection::Hbt => 0.0,
            Detection::Homodyne(h) => h.alpha * h.alpha,
        };
        p.max_rate().max(lo)
    }

    pub fn max_dt(p: &TrionParams, detection: &Detection) -> f64 {
        DT_FRACTION / Self::max_rate(p, detection)
    }

    pub fn validate(&self, p: &TrionParams) -> Result<()> {
        if self.n_trajectories == 0 || !(self.duration > 0.0) || !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "trajectories need n >= 1, duration > 0, dt > 0 (got {}, {}, {})",
                self.n_trajectories,
                self.duration,
                self.dt
            )));
        }
        let max_step = Self::max_dt(p, &self.detection);
        if self.dt > max_step {
            return Err(Error::GridTooCoarse {
                step: self.dt,
                max_step,
            });
        }
        if let Detection::Homodyne(h) = &self.detection {
            h.validate()?;
        }
        Ok(())
    }

    /// Number of `dt` steps per trajectory.
    pub fn steps(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }
}

/// A jump operator and the detector it clicks, if any.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    pub op: ComplexMatrix,
    pub detector: Option<Channel>,
}

/// Jump operators for a detection scheme, given the LO amplitude
/// `α e^{i(φ+φ_ref)}` for homodyne.
pub fn jump_channels(p: &TrionParams, detection: &Detection, lo: C64) -> Vec<JumpChannel> {
    let e_v = trion::v_port_field_op(p);
    let mut out = Vec::new();
    match detection {
        Detection::Hbt => {
            let half = e_v.scale_re(core::f64::consts::FRAC_1_SQRT_2);
            out.push(JumpChannel {
                op: half.clone(),
                detector: Some(Channel::A),
            });
            out.push(JumpChannel {
                op: half,
                detector: Some(Channel::B),
            });
        }
        Detection::Homodyne(_) => {
            let lo_op = ComplexMatrix::identity(trion::DIM).scale(lo);
            let s = core::f64::consts::FRAC_1_SQRT_2;
            out.push(JumpChannel {
                op: (&lo_op + &e_v).scale_re(s),
                detector: Some(Channel::A),
            });
            out.push(JumpChannel {
                op: (&lo_op - &e_v).scale_re(s),
                detector: Some(Channel::B),
            });
        }
    }
    if p.gamma > 0.0 {
        out.push(JumpChannel {
            op: trion::h_port_field_op(p),
            detector: None,
        });
    }
    out.extend(trion::dephasing_ops(p).into_iter().map(|op| JumpChannel { op, detector: None }));
    out
}

/// No-jump propagators and jump operators for one parameter set.
#[derive(Debug, Clone)]
pub struct Unraveling {
    /// `powers[k] = U^(2^k)` with `U = exp(−i H_eff dt)`.
    powers: Vec<DMatrix<C64>>,
    channels: Vec<JumpChannel>,
    dt: f64,
}

const MAX_POWER: usize = 48;

impl Unraveling {
    pub fn new(hamiltonian: &ComplexMatrix, channels: Vec<JumpChannel>, dt: f64) -> Self {
        let mut h_eff = hamiltonian.as_inner().clone();
        for c in &channels {
            let jj = c.op.dagger().as_inner() * c.op.as_inner();
            h_eff -= jj * C64::new(0.0, 0.5);
        }
        let u = expm(&(h_eff * C64::new(0.0, -dt)));
        let mut powers = Vec::with_capacity(MAX_POWER);
        powers.push(u);
        for k in 1..MAX_POWER {
            let prev = &powers[k - 1];
            let next = prev * prev;
            powers.push(next);
        }
        Self { powers, channels, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    /// Evolves the normalized state `psi` for `steps` steps, calling
    /// `on_jump(step, channel_index)` after each jump; `step` counts from the
    /// start of this call and the jump is placed at the end of that step.
    pub fn advance<R: Rng + ?Sized>(&self, psi: &mut DVector<C64>, steps: u64, rng: &mut R, mut on_jump: impl FnMut(u64, usize)) {
        let mut done = 0u64;
        while done < steps {
            let r: f64 = rng.random();
            let remaining = steps - done;
            let mut phi = psi.clone();
            let mut n = 0u64;
            for k in (0..self.powers.len()).rev() {
                let stride = 1u64 << k;
                if n + stride > remaining {
                    continue;
                }
                let cand = &self.powers[k] * &phi;
                if cand.norm_squared() > r {
                    phi = cand;
                    n += stride;
                }
            }
            if n == remaining {
                *psi = normalized(phi);
                return;
            }
            let after = &self.powers[0] * &phi;
            done += n + 1;
            let weights: Vec<f64> = self
                .channels
                .iter()
                .map(|c| (c.op.as_inner() * &after).norm_squared())
                .collect();
            let total: f64 = weights.iter().sum();
            if !(total > 0.0) {
                *psi = normalized(after);
                continue;
            }
            let mut pick = rng.random::<f64>() * total;
            let mut chosen = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    chosen = i;
                    break;
                }
                pick -= w;
            }
            *psi = normalized(self.channels[chosen].op.as_inner() * &after);
            on_jump(done, chosen);
        }
    }
}

fn normalized(v: DVector<C64>) -> DVector<C64> {
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// RNG for trajectory `index`: ChaCha8 keyed by the seed, with the index as
/// stream number, so trajectories are independent of evaluation order.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws a pure state from the eigen-decomposition of `rho`.
pub fn sample_pure_state<R: Rng + ?Sized>(rho: &DensityMatrix, rng: &mut R) -> DVector<C64> {
    let eig = rho.matrix().hermitian_eigen();
    let mut pick = rng.random::<f64>();
    let mut chosen = eig.len() - 1;
    for (i, (w, _)) in eig.iter().enumerate() {
        let w = w.max(0.0);
        if pick < w {
            chosen = i;
            break;
        }
        pick -= w;
    }
    DVector::from_vec(eig[chosen].1.clone())
}

/// Stationary state the streams start from. With no drive the generator has
/// no unique steady state; the spin-unpolarized ground state is used.
fn initial_state(p: &TrionParams) -> Result<DensityMatrix> {
    let generator = liouvillian(&trion::build_hamiltonian(p), &trion::build_collapse_ops(p))?;
    match steady_state(&generator) {
        Ok(rho) => Ok(rho),
        Err(Error::DegenerateSteadyState { .. }) if p.omega_rabi == 0.0 => {
            let mut m = ComplexMatrix::zeros(trion::DIM);
            m.set(0, 0, C64::new(0.5, 0.0));
            m.set(1, 1, C64::new(0.5, 0.0));
            DensityMatrix::new(m)
        }
        Err(e) => Err(e),
    }
}

/// Detected tags of one trajectory, `(channel, time in ps)` relative to the
/// start of the stream, in emission order (jittered times may be unsorted).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryTags {
    pub tags: Vec<(Channel, i64)>,
}

/// Shared, per-configuration data for generating trajectories.
#[derive(Debug, Clone)]
pub struct StreamPlan {
    params: TrionParams,
    config: TrajectoryConfig,
    detector: DetectorModel,
    stationary: DensityMatrix,
    /// Unraveling per LO phase sample (one entry unless phase noise is on).
    fixed: Option<Unraveling>,
}

impl StreamPlan {
    pub fn new(p: &TrionParams, cfg: &TrajectoryConfig, det: &DetectorModel) -> Result<Self> {
        p.validate()?;
        p.check_weak_drive();
        cfg.validate(p)?;
        det.validate()?;
        let stationary = initial_state(p)?;
        let fixed = match &cfg.detection {
            Detection::Homodyne(h) if h.phase_noise_sigma > 0.0 => None,
            Detection::Homodyne(h) => Some(Self::unraveling(p, cfg, h.lo_amplitude(h.phi_lo))),
            Detection::Hbt => Some(Self::unraveling(p, cfg, C64::new(0.0, 0.0))),
        };
        Ok(Self {
            params: *p,
            config: *cfg,
            detector: *det,
            stationary,
            fixed,
        })
    }

    fn unraveling(p: &TrionParams, cfg: &TrajectoryConfig, lo: C64) -> Unraveling {
        Unraveling::new(&trion::build_hamiltonian(p), jump_channels(p, &cfg.detection, lo), cfg.dt)
    }

    pub fn config(&self) -> &TrajectoryConfig {
        &self.config
    }

    /// Runs trajectory `index`. Results depend only on the seed and index.
    pub fn run(&self, index: usize) -> TrajectoryTags {
        let mut rng = trajectory_rng(self.config.seed, index as u64);
        let noisy;
        let unraveling = match (&self.fixed, &self.config.detection) {
            (Some(u), _) => u,
            (None, Detection::Homodyne(h)) => {
                let phi = h.phi_lo + h.phase_noise_sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                noisy = Self::unraveling(&self.params, &self.config, h.lo_amplitude(phi));
                &noisy
            }
            (None, Detection::Hbt) => unreachable!("HBT plans always have a fixed unraveling"),
        };
        let mut psi = sample_pure_state(&self.stationary, &mut rng);
        let mut jumps: Vec<(u64, Channel)> = Vec::new();
        let steps = self.config.steps();
        unraveling.advance(&mut psi, steps, &mut rng, |step, ch| {
            if let Some(d) = unraveling.channels()[ch].detector {
                jumps.push((step, d));
            }
        });
        let offset_ns = index as f64 * self.config.duration;
        let jitter = if self.detector.jitter_sigma > 0.0 {
            Normal::new(0.0, self.detector.jitter_sigma).ok()
        } else {
            None
        };
        let mut tags = Vec::with_capacity(jumps.len());
        for (step, ch) in jumps {
            if self.detector.efficiency < 1.0 && rng.random::<f64>() >= self.detector.efficiency {
                continue;
            }
            let mut t = offset_ns + step as f64 * self.config.dt;
            if let Some(n) = &jitter {
                t += n.sample(&mut rng);
            }
            tags.push((ch, (t * PS_PER_NS).round() as i64));
        }
        TrajectoryTags { tags }
    }

    /// Merges trajectories (in index order) into a stream: tags are sorted,
    /// repeated times within a channel collapse to one tag, and tags outside
    /// `[0, n·duration]` are dropped.
    pub fn merge(&self, trajectories: impl IntoIterator<Item = TrajectoryTags>) -> TimeTagStream {
        let total_ps = (self.config.n_trajectories as f64 * self.config.duration * PS_PER_NS).round() as i64;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for t in trajectories {
            for (ch, ps) in t.tags {
                if (0..=total_ps).contains(&ps) {
                    match ch {
                        Channel::A => a.push(ps as u64),
                        Channel::B => b.push(ps as u64),
                    }
                }
            }
        }
        for v in [&mut a, &mut b] {
            v.sort_unstable();
            v.dedup();
        }
        TimeTagStream {
            channel_a: a,
            channel_b: b,
            duration_ps: total_ps as u64,
            seed: self.config.seed,
        }
    }
}

/// Simulates all trajectories sequentially and merges them.
pub fn simulate_stream(p: &TrionParams, cfg: &TrajectoryConfig, det: &DetectorModel) -> Result<TimeTagStream> {
    let plan = StreamPlan::new(p, cfg, det)?;
    Ok(plan.merge((0..cfg.n_trajectories).map(|i| plan.run(i))))
}

/// Mean and standard error of the trajectory density matrix at checkpoints.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    pub time: f64,
    pub mean: ComplexMatrix,
    /// Standard errors of the real and imaginary parts, elementwise.
    pub stderr_re: DMatrix<f64>,
    pub stderr_im: DMatrix<f64>,
}

/// Averages `|ψ⟩⟨ψ|` over `n` trajectories started in `psi0`, evolved with all
/// master-equation jump channels (HBT split), at each checkpoint time.
pub fn ensemble_state(p: &TrionParams, psi0: &[C64], checkpoints: &[f64], n: usize, dt: f64, seed: u64) -> Result<Vec<StateEstimate>> {
    p.validate()?;
    let max_step = TrajectoryConfig::max_dt(p, &Detection::Hbt);
    if dt > max_step {
        return Err(Error::GridTooCoarse { step: dt, max_step });
    }
    let dim = trion::DIM;
    if psi0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: psi0.len(),
        });
    }
    let unraveling = Unraveling::new(&trion::build_hamiltonian(p), jump_channels(p, &Detection::Hbt, C64::new(0.0, 0.0)), dt);
    let steps: Vec<u64> = checkpoints.iter().map(|t| (t / dt).round() as u64).collect();
    let mut sum = vec![DMatrix::<C64>::zeros(dim, dim); steps.len()];
    let mut sq_re = vec![DMatrix::<f64>::zeros(dim, dim); steps.len()];
    let mut sq_im = vec![DMatrix::<f64>::zeros(dim, dim); steps.len()];
    let start = normalized(DVector::from_column_slice(psi0));
    for i in 0..n {
        let mut rng = trajectory_rng(seed, i as u64);
        let mut psi = start.clone();
        let mut at = 0u64;
        for (c, &s) in steps.iter().enumerate() {
            unraveling.advance(&mut psi, s.saturating_sub(at), &mut rng, |_, _| {});
            at = at.max(s);
            let rho = &psi * psi.adjoint();
            sum[c] += &rho;
            sq_re[c] += rho.map(|z| z.re * z.re);
            sq_im[c] += rho.map(|z| z.im * z.im);
        }
    }
    let nf = n as f64;
    Ok(checkpoints
        .iter()
        .enumerate()
        .map(|(c, &time)| {
            let mean = sum[c].map(|z| z / nf);
            let se = |sq: &DMatrix<f64>, m: &DMatrix<f64>| {
                DMatrix::from_fn(dim, dim, |i, j| {
                    let var = (sq[(i, j)] / nf - m[(i, j)] * m[(i, j)]).max(0.0) * nf / (nf - 1.0).max(1.0);
                    (var / nf).sqrt()
                })
            };
            let stderr_re = se(&sq_re[c], &mean.map(|z| z.re));
            let stderr_im = se(&sq_im[c], &mean.map(|z| z.im));
            StateEstimate {
                time,
                mean: ComplexMatrix::from_inner(mean),
                stderr_re,
                stderr_im,
            }
        })
        .collect())
}
