// Copyright 2026 The spinmod Authors
// SPDX-License-Identifier: Apache-2.0

//! In-place iterative radix-2 FFT.

use core::f64::consts::PI;

use num_traits::Float;

use crate::C64;

/// Forward transform `X_k = Σ_j x_j e^{-2πi jk/N}`. `data.len()` must be a power of two.
pub fn fft_in_place(data: &mut [C64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = -2.0 * PI / len as f64;
        let w_len = C64::new(angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let mut w = C64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[start + k];
                let v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}
