use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic sampling of `[-L, L)` with `n` points (`n` a power of
/// two). Wavenumbers are `ξ_j = πj/L` for `j ∈ {-n/2, …, n/2-1}`, stored in
/// FFT order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_length: f64,
    n: usize,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::invalid(format!(
                "half-length must be positive, got {half_length}"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::invalid(format!(
                "point count must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Self { half_length, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed wavenumber index of FFT bin `k`.
    pub fn bin_index(&self, k: usize) -> i64 {
        signed_index(k, self.n)
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        self.fundamental() * self.bin_index(k) as f64
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    /// Spacing `π/L` of the wavenumber lattice.
    pub fn fundamental(&self) -> f64 {
        PI / self.half_length
    }

    /// Magnitude of the Nyquist wavenumber.
    pub fn xi_max(&self) -> f64 {
        self.fundamental() * (self.n / 2) as f64
    }

    pub fn nyquist_bin(&self) -> usize {
        self.n / 2
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.half_length, self.n * factor)
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(L={}, n={}) vs (L={}, n={})",
                self.half_length, self.n, other.half_length, other.n
            )))
        }
    }

    /// Smooth window equal to one on `|x| ≤ (1-buffer)L`, rolling off to
    /// machine zero at `|x| = L` through error-function ramps. Its Fourier
    /// transform is Gaussian-damped, so multiplying a resolved field by it
    /// keeps the field resolved.
    pub fn boundary_taper(&self, buffer: f64) -> Vec<f64> {
        let b = buffer.clamp(1e-6, 0.5) * self.half_length;
        let center = self.half_length - 0.5 * b;
        let width = b / 12.0;
        self.points()
            .into_iter()
            .map(|x| {
                let left = statrs::function::erf::erf((x + center) / width);
                let right = statrs::function::erf::erf((x - center) / width);
                0.5 * (left - right)
            })
            .collect()
    }

    /// Whether grid point `j` lies in the boundary buffer `|x| > (1-buffer)L`.
    pub fn in_buffer(&self, j: usize, buffer: f64) -> bool {
        self.x(j).abs() > (1.0 - buffer) * self.half_length
    }
}

pub(crate) fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}
