// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use num_traits::Float;

use super::correlator::count_pairs_within;

pub const PS_PER_NS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    A,
    B,
}

impl Channel {
    pub fn code(self) -> u8 {
        match self {
            Channel::A => 0,
            Channel::B => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Channel::A),
            1 => Some(Channel::B),
            _ => None,
        }
    }
}

/// Photon detection times of two detectors, in integer picoseconds.
///
/// Each channel is strictly increasing and lies in `[0, duration_ps]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimeTagStream {
    pub channel_a: Vec<u64>,
    pub channel_b: Vec<u64>,
    pub duration_ps: u64,
    pub seed: u64,
}

impl TimeTagStream {
    pub fn duration(&self) -> f64 {
        self.duration_ps as f64 / PS_PER_NS
    }

    pub fn channel(&self, c: Channel) -> &[u64] {
        match c {
            Channel::A => &self.channel_a,
            Channel::B => &self.channel_b,
        }
    }

    pub fn times_ns(&self, c: Channel) -> Vec<f64> {
        self.channel(c).iter().map(|&t| t as f64 / PS_PER_NS).collect()
    }

    /// `true` if both channels are strictly increasing and within the duration.
    pub fn is_well_formed(&self) -> bool {
        [&self.channel_a, &self.channel_b]
            .iter()
            .all(|v| v.windows(2).all(|w| w[0] < w[1]) && v.last().is_none_or(|&t| t <= self.duration_ps))
    }

    /// All tags as `(time, channel)`, ordered by time then channel.
    pub fn merged(&self) -> Vec<(u64, Channel)> {
        let mut out: Vec<(u64, Channel)> = self
            .channel_a
            .iter()
            .map(|&t| (t, Channel::A))
            .chain(self.channel_b.iter().map(|&t| (t, Channel::B)))
            .collect();
        out.sort_unstable();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamStatistics {
    pub counts_a: usize,
    pub counts_b: usize,
    /// Mean click rates, 1/ns.
    pub rate_a: f64,
    pub rate_b: f64,
    /// A–B pairs with `|t_B − t_A| ≤ tau_max`.
    pub pairs_within: u64,
}

pub fn stream_statistics(stream: &TimeTagStream, tau_max: f64) -> StreamStatistics {
    let t = stream.duration();
    let rate = |n: usize| if t > 0.0 { n as f64 / t } else { 0.0 };
    let window = (tau_max * PS_PER_NS).round() as u64;
    StreamStatistics {
        counts_a: stream.channel_a.len(),
        counts_b: stream.channel_b.len(),
        rate_a: rate(stream.channel_a.len()),
        rate_b: rate(stream.channel_b.len()),
        pairs_within: count_pairs_within(&stream.channel_a, &stream.channel_b, window),
    }
}
