//! The nonlinear term `f(u + Ψ) - f(Ψ)` of the perturbation equation.
//!
//! Polynomial fluxes of degree `d ≥ 2` are evaluated on a zero-padded grid
//! of at least `(d+1)n/2` points, enough to represent `u^d` times a
//! resolved coefficient without aliasing into the retained band. Other
//! fluxes are evaluated pointwise and the top third of the spectrum is
//! discarded.

use num_complex::Complex64;

use super::fft;
use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dealias {
    /// Zero-padding to the fine grid, then truncation.
    Padded { fine_n: usize },
    /// Pointwise evaluation followed by a 2/3 low-pass.
    LowPass,
    /// Linear flux, no products.
    None,
}

/// Reusable evaluator of the flux for one grid and one nonlinearity.
#[derive(Debug, Clone)]
pub struct FluxEvaluator {
    grid: Grid,
    nl: AnalyticNonlinearity,
    rule: Dealias,
}

impl FluxEvaluator {
    pub fn new(grid: Grid, nl: AnalyticNonlinearity) -> Self {
        let rule = match nl.polynomial_degree() {
            Some(d) if d <= 1 => Dealias::None,
            Some(d) => {
                let need = (d + 1) * grid.n() / 2;
                Dealias::Padded {
                    fine_n: need.next_power_of_two().max(grid.n()),
                }
            }
            None => Dealias::LowPass,
        };
        Self { grid, nl, rule }
    }

    /// Forces the pointwise-plus-low-pass rule for any flux.
    pub fn low_pass(grid: Grid, nl: AnalyticNonlinearity) -> Self {
        let rule = if nl.polynomial_degree().is_some_and(|d| d <= 1) {
            Dealias::None
        } else {
            Dealias::LowPass
        };
        Self { grid, nl, rule }
    }

    pub fn rule(&self) -> Dealias {
        self.rule
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nonlinearity(&self) -> &AnalyticNonlinearity {
        &self.nl
    }

    /// Abscissae at which the caller must supply `Ψ`.
    pub fn evaluation_points(&self) -> Vec<f64> {
        match self.rule {
            Dealias::Padded { fine_n } => Grid::new(self.grid.half_length(), fine_n)
                .expect("power of two")
                .points(),
            _ => self.grid.points(),
        }
    }

    /// Coefficients of `f(u + Ψ) - f(Ψ)` on the base grid, given `û` and `Ψ`
    /// sampled at [`evaluation_points`](Self::evaluation_points).
    pub fn apply(&self, u_hat: &[Complex64], psi: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n();
        match self.rule {
            Dealias::None => {
                let a1 = self.nl.coeffs().get(1).copied().unwrap_or(0.0);
                u_hat.iter().map(|c| c * a1).collect()
            }
            Dealias::Padded { fine_n } => {
                let u = fft::inverse_real(&fft::resample(u_hat, fine_n));
                let vals: Vec<f64> = u.iter().zip(psi).map(|(&u, &p)| self.nl.increment(p, u)).collect();
                fft::resample(&fft::forward_real(&vals), n)
            }
            Dealias::LowPass => {
                let u = fft::inverse_real(u_hat);
                let vals: Vec<f64> = u.iter().zip(psi).map(|(&u, &p)| self.nl.increment(p, u)).collect();
                let mut c = fft::forward_real(&vals);
                for (k, z) in c.iter_mut().enumerate() {
                    if 3 * self.grid.bin_index(k).unsigned_abs() as usize > n {
                        *z = Complex64::new(0.0, 0.0);
                    }
                }
                c
            }
        }
    }
}

/// `f(u + Ψ(t,·)) - f(Ψ(t,·))` on the grid of `u`.
pub fn nonlinear_flux(
    u: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    t: f64,
    tail_threshold: f64,
) -> Result<PhysicalField> {
    let spec = u.transform();
    super::field::check_resolved(&spec, tail_threshold, "perturbation")?;
    let eval = FluxEvaluator::new(*u.grid(), nl.clone());
    let psi = bg.psi_at(t, &eval.evaluation_points())?;
    let out = SpectralField::new(*u.grid(), eval.apply(spec.coeffs(), &psi))?;
    if !out.is_finite() {
        return Err(Error::NonFinite {
            context: "nonlinear flux".into(),
        });
    }
    Ok(out.inverse())
}
