// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::stream::{TimeTagStream, PS_PER_NS};
use crate::{Error, Result};

/// Start–stop histogram of lags `t_B − t_A` in bins centred on multiples of
/// the bin width, covering `[−m·w, m·w]` with `m = ⌊τ_max/w⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    pub bin_width_ps: u64,
    /// Lag of each bin centre, ns.
    pub lags: Vec<f64>,
    pub counts: Vec<u64>,
    /// Expected accidental counts per bin, `N_A·N_B·w/T`.
    pub normalization: f64,
}

impl CoincidenceHistogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_width_ps as f64 / PS_PER_NS
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.normalization).collect()
    }

    /// Poisson standard error of each normalized bin.
    pub fn normalized_errors(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| (c.max(1) as f64).sqrt() / self.normalization)
            .collect()
    }
}

struct Binning {
    width: i64,
    half: i64,
    m: i64,
}

impl Binning {
    fn new(bin_width: f64, tau_max: f64) -> Result<Self> {
        let width = (bin_width * PS_PER_NS).round() as i64;
        if width < 1 || !(tau_max >= 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "correlator needs bin >= 1 ps and tau_max >= 0 (got {bin_width} ns, {tau_max} ns)"
            )));
        }
        let m = (tau_max * PS_PER_NS / width as f64).floor() as i64;
        Ok(Self { width, half: width / 2, m })
    }

    /// Bin offset from the centre bin, or `None` outside the histogram.
    #[inline]
    fn bin(&self, lag: i64) -> Option<usize> {
        let k = (lag + self.half).div_euclid(self.width);
        if (-self.m..=self.m).contains(&k) {
            Some((k + self.m) as usize)
        } else {
            None
        }
    }

    /// Inclusive lag range covered by the bins.
    fn lag_range(&self) -> (i64, i64) {
        (-self.m * self.width - self.half, (self.m + 1) * self.width - self.half - 1)
    }

    fn histogram(&self, counts: Vec<u64>, stream: &TimeTagStream) -> CoincidenceHistogram {
        let t = stream.duration();
        let w = self.width as f64 / PS_PER_NS;
        CoincidenceHistogram {
            bin_width_ps: self.width as u64,
            lags: (-self.m..=self.m).map(|k| k as f64 * w).collect(),
            counts,
            normalization: stream.channel_a.len() as f64 * stream.channel_b.len() as f64 * w / t,
        }
    }
}

fn check(stream: &TimeTagStream, tau_max: f64) -> Result<()> {
    if stream.channel_a.is_empty() {
        return Err(Error::EmptyChannel('A'));
    }
    if stream.channel_b.is_empty() {
        return Err(Error::EmptyChannel('B'));
    }
    if tau_max > stream.duration() / 10.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "tau_max {tau_max} ns exceeds a tenth of the stream duration {} ns",
            stream.duration()
        )));
    }
    Ok(())
}

/// Coincidence histogram by a sliding window over channel B; the cost is
/// linear in tags times the mean window occupancy.
pub fn correlate(stream: &TimeTagStream, bin_width: f64, tau_max: f64) -> Result<CoincidenceHistogram> {
    check(stream, tau_max)?;
    let binning = Binning::new(bin_width, tau_max)?;
    let (lo, hi) = binning.lag_range();
    let b = &stream.channel_b;
    let mut counts = vec![0u64; (2 * binning.m + 1) as usize];
    let mut start = 0usize;
    for &ta in &stream.channel_a {
        let ta = ta as i64;
        while start < b.len() && (b[start] as i64) - ta < lo {
            start += 1;
        }
        let mut j = start;
        while j < b.len() && (b[j] as i64) - ta <= hi {
            if let Some(k) = binning.bin(b[j] as i64 - ta) {
                counts[k] += 1;
            }
            j += 1;
        }
    }
    Ok(binning.histogram(counts, stream))
}

/// Reference histogram over all A–B pairs (quadratic cost).
pub fn correlate_all_pairs(stream: &TimeTagStream, bin_width: f64, tau_max: f64) -> Result<CoincidenceHistogram> {
    check(stream, tau_max)?;
    let binning = Binning::new(bin_width, tau_max)?;
    let mut counts = vec![0u64; (2 * binning.m + 1) as usize];
    for &ta in &stream.channel_a {
        for &tb in &stream.channel_b {
            if let Some(k) = binning.bin(tb as i64 - ta as i64) {
                counts[k] += 1;
            }
        }
    }
    Ok(binning.histogram(counts, stream))
}

/// Number of pairs with `|t_B − t_A| ≤ window` (sorted inputs).
pub(crate) fn count_pairs_within(a: &[u64], b: &[u64], window: u64) -> u64 {
    let mut total = 0u64;
    let (mut lo, mut hi) = (0usize, 0usize);
    for &t in a {
        while lo < b.len() && b[lo] + window < t {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < b.len() && b[hi] <= t + window {
            hi += 1;
        }
        total += (hi - lo) as u64;
    }
    total
}
