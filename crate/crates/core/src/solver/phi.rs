//! The entire functions `φ_k(z) = Σ_j z^j / (j+k)!` used by exponential
//! integrators.

use num_complex::Complex64;

const SERIES_TERMS: usize = 20;

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

/// `[φ_0(z), …, φ_kmax(z)]`.
///
/// Inside the unit disc the Taylor series is summed directly; outside, the
/// recurrence `φ_{k+1} = (φ_k - 1/k!)/z` loses no accuracy.
pub fn phi_functions(z: Complex64, kmax: usize) -> Vec<Complex64> {
    if z.norm() < 1.0 {
        series(z, kmax)
    } else {
        recurrence(z, kmax)
    }
}

fn series(z: Complex64, kmax: usize) -> Vec<Complex64> {
    (0..=kmax)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (0..SERIES_TERMS).rev() {
                acc = acc * z + 1.0 / factorial(j + k);
            }
            acc
        })
        .collect()
}

fn recurrence(z: Complex64, kmax: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(z.exp());
    for k in 0..kmax {
        let next = (out[k] - 1.0 / factorial(k)) / z;
        out.push(next);
    }
    out
}

/// `φ_k(z)` for a single `k`.
pub fn phi(k: usize, z: Complex64) -> Complex64 {
    phi_functions(z, k)[k]
}
