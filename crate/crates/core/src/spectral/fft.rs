//! Thin layer over `rustfft` fixing the coefficient convention.
//!
//! Coefficients are taken with respect to the centered coordinate
//! `x_m = -L + m·dx`: a field `u` is represented as `u(x) = Σ_j û_j e^{iξ_j x}`,
//! so a unit plane wave has coefficient 1 and the coefficients of a field do
//! not depend on the sample count used to represent it. The latter property
//! is what zero-padding relies on.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::signed_index;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized transform (`e^{-2πikm/n}` forward, `e^{+…}` inverse).
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    if buf.is_empty() {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

#[inline]
fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Coefficients of real samples on an even-length centered grid.
pub fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        *c *= parity(k) * scale;
    }
    buf
}

/// Real part of the synthesis `Σ_j û_j e^{iξ_j x_m}` on `coeffs.len()` points.
pub fn inverse_real(coeffs: &[Complex64]) -> Vec<f64> {
    inverse_complex(coeffs).into_iter().map(|c| c.re).collect()
}

pub fn inverse_complex(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = coeffs.iter().enumerate().map(|(k, &c)| c * parity(k)).collect();
    fft_in_place(&mut buf, true);
    buf
}

/// Moves coefficients between FFT-ordered arrays of different lengths,
/// matching bins by signed index. Bins without a counterpart are zero; the
/// Nyquist bin of the shorter array is dropped so real fields stay real.
pub fn resample(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let half = (n.min(m) / 2) as i64;
    for (k, &c) in coeffs.iter().enumerate() {
        let j = signed_index(k, n);
        if j.abs() >= half {
            continue;
        }
        let dest = if j >= 0 { j as usize } else { (m as i64 + j) as usize };
        out[dest] = c;
    }
    out
}
