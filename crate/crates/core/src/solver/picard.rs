use num_complex::Complex64;

use super::phi::phi_functions;
use super::{SolverConfig, Stepper};
use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::norms::sobolev_norm_spectral;
use crate::spectral::{PhysicalField, SpectralField, Trajectory};

pub const PICARD_TOL: f64 = 1e-10;
pub const PICARD_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    /// `sup_t ‖u^{(j+1)} - u^{(j)}‖_{H^{s-1}}` per iteration.
    pub differences: Vec<f64>,
}

impl PicardReport {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }

    /// Ratios of consecutive differences.
    pub fn factors(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Coefficients of the Lagrange basis on `nodes` in powers of `θ`.
fn lagrange_monomials(nodes: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (k, &c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= nodes[j] * c;
            }
            poly = next;
            denom *= nodes[i] - nodes[j];
        }
        for k in 0..4 {
            out[i][k] = poly[k] / denom;
        }
    }
    out
}

/// Per-bin weights `w_i(ξ) = h Σ_k B_{ki} k! φ_{k+1}(L(ξ)h)` so that
/// `∫_0^h e^{L(h-s)} p(s) ds = Σ_i w_i p(o_i h)` for cubic `p`.
fn duhamel_weights(lin: &[Complex64], h: f64, nodes: &[f64; 4]) -> Vec<[Complex64; 4]> {
    let basis = lagrange_monomials(nodes);
    let fact = [1.0, 1.0, 2.0, 6.0];
    lin.iter()
        .map(|&l| {
            let p = phi_functions(l * h, 4);
            let mut w = [Complex64::new(0.0, 0.0); 4];
            for i in 0..4 {
                for k in 0..4 {
                    w[i] += p[k + 1] * (basis[i][k] * fact[k] * h);
                }
            }
            w
        })
        .collect()
}

/// Fixed point of the Duhamel map of the `μ`-regularized equation on
/// `[0, config.t_final]` with lattice step from `config.lattice()`.
/// Iterates start from `u^{(0)} ≡ 0`; the nonlinear term is interpolated
/// by local cubics and integrated against `W_μ` exactly.
pub fn picard_solve(
    u0: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    config: &SolverConfig,
    s: f64,
) -> Result<(Trajectory, PicardReport)> {
    config.validate()?;
    if !(config.mu > 0.0) {
        return Err(Error::invalid("Picard iteration needs mu > 0"));
    }
    let grid = *u0.grid();
    let u0_hat = u0.transform();
    super::check_perturbation(&u0_hat, config.tail_threshold, "initial data")?;
    let base = config.clone().with_save_every(1);
    let (steps, h) = base.lattice();
    if steps < 3 {
        return Err(Error::invalid("Picard lattice needs at least three steps"));
    }
    let stepper = Stepper::new(grid, bg, nl, &base, h)?;
    let mu = config.mu;
    let lin: Vec<Complex64> = grid
        .wavenumbers()
        .iter()
        .map(|&xi| Complex64::new(-mu * xi * xi, xi * xi * xi))
        .collect();
    let e: Vec<Complex64> = lin.iter().map(|l| (l * h).exp()).collect();
    let stencils = [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.0, 1.0, 2.0], [-2.0, -1.0, 0.0, 1.0]];
    let weights: Vec<_> = stencils.iter().map(|o| duhamel_weights(&lin, h, o)).collect();

    let n = grid.n();
    let mut iterate = vec![SpectralField::zeros(grid); steps + 1];
    let mut differences = Vec::new();
    loop {
        let forcing: Vec<Vec<Complex64>> = iterate
            .iter()
            .enumerate()
            .map(|(m, u)| stepper.nonlinear_part(u, m as f64 * h))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(steps + 1);
        next.push(u0_hat.clone());
        for m in 0..steps {
            let (which, first) = if m == 0 {
                (0, 0)
            } else if m + 2 <= steps {
                (1, m - 1)
            } else {
                (2, m - 2)
            };
            let w = &weights[which];
            let prev = next[m].coeffs();
            let c: Vec<Complex64> = (0..n)
                .map(|k| {
                    let mut acc = e[k] * prev[k];
                    for i in 0..4 {
                        acc += w[k][i] * forcing[first + i][k];
                    }
                    acc
                })
                .collect();
            next.push(SpectralField::new(grid, c)?);
        }
        let diff = next
            .iter()
            .zip(&iterate)
            .map(|(a, b)| a.sub(b).map(|d| sobolev_norm_spectral(&d, s - 1.0)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if !diff.is_finite() {
            return Err(Error::NoContraction {
                iterations: differences.len() + 1,
                last: diff,
            });
        }
        differences.push(diff);
        iterate = next;
        if diff <= PICARD_TOL {
            break;
        }
        if differences.len() >= PICARD_MAX_ITER {
            return Err(Error::NoContraction {
                iterations: differences.len(),
                last: diff,
            });
        }
    }
    let frames = iterate.iter().map(|f| f.inverse()).collect();
    Ok((Trajectory::new(grid, 0.0, h, frames)?, PicardReport { differences }))
}
