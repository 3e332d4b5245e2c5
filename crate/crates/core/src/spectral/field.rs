use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Real samples `u_j = u(x_j)` on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

/// Fourier coefficients in FFT order; see [`fft`] for the convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "physical field samples".into(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn transform(&self) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: fft::forward_real(&self.values),
        }
    }

    /// `∫ u dx` by the rectangle rule (exact for band-limited periodic data).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    /// Fraction of the L² mass carried by the boundary buffer.
    pub fn buffer_fraction(&self, buffer: f64) -> (f64, f64) {
        let mut inside = 0.0;
        let mut total = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let w = v * v;
            total += w;
            if self.grid.in_buffer(j, buffer) {
                inside += w;
            }
        }
        let dx = self.grid.dx();
        (inside * dx, total * dx)
    }
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub(crate) fn from_raw(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn inverse(&self) -> PhysicalField {
        PhysicalField {
            grid: self.grid,
            values: fft::inverse_real(&self.coeffs),
        }
    }

    /// Applies the Fourier multiplier `m(ξ)`.
    pub fn multiplied(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * m(self.grid.wavenumber(k)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Same as [`multiplied`](Self::multiplied) for a real symbol.
    pub fn multiplied_real(&self, m: impl Fn(f64) -> f64) -> Self {
        self.multiplied(|xi| Complex64::new(m(xi), 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `‖u‖²_{L²} = 2L Σ_j |û_j|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Weighted sum `2L Σ_j w(ξ_j) |û_j|²`.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.grid.length()
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| w(self.grid.wavenumber(k)) * c.norm_sqr())
                .sum::<f64>()
    }

    /// `max_j |û(ξ_j) - conj(û(-ξ_j))|`, skipping the unpaired Nyquist bin.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        (1..n)
            .filter(|&k| k != n / 2)
            .map(|k| (self.coeffs[k] - self.coeffs[n - k].conj()).norm())
            .chain(std::iter::once(self.coeffs[0].im.abs()))
            .fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude above `2ξ_max/3`, relative to the largest
    /// coefficient overall. Zero for the zero field.
    pub fn spectral_tail(&self) -> f64 {
        let n = self.grid.n() as i64;
        let mut peak = 0.0f64;
        let mut tail = 0.0f64;
        for (k, c) in self.coeffs.iter().enumerate() {
            let a = c.norm();
            peak = peak.max(a);
            if 3 * self.grid.bin_index(k).abs() > n {
                tail = tail.max(a);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Errors with [`Error::Unresolved`] if the spectral tail exceeds `threshold`.
pub fn check_resolved(field: &SpectralField, threshold: f64, what: &str) -> Result<()> {
    let tail = field.spectral_tail();
    if tail > threshold {
        Err(Error::Unresolved {
            what: what.to_string(),
            tail,
            threshold,
        })
    } else {
        Ok(())
    }
}
