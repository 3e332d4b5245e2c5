use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;

use super::phi::phi_functions;
use super::{DealiasRule, Scheme, SimulationState, SolverConfig};
use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::spectral::fft;
use crate::spectral::{FluxEvaluator, Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Background data needed at one stage time.
#[derive(Debug, Clone)]
struct StageData {
    psi: Vec<f64>,
    forcing: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum Coefficients {
    Etd {
        e: Vec<Complex64>,
        e2: Vec<Complex64>,
        q: Vec<Complex64>,
        f1: Vec<Complex64>,
        f2: Vec<Complex64>,
        f3: Vec<Complex64>,
    },
    If {
        e: Vec<Complex64>,
        e2: Vec<Complex64>,
    },
}

/// Fixed-step integrator with precomputed linear coefficients.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    h: f64,
    bg: BackgroundField,
    nl: AnalyticNonlinearity,
    flux: FluxEvaluator,
    points: Vec<f64>,
    taper: Vec<f64>,
    tail_threshold: f64,
    ik: Vec<Complex64>,
    coeffs: Coefficients,
    cache: RefCell<Vec<(f64, Arc<StageData>)>>,
}

impl Stepper {
    /// `h` may be negative only when `μ = 0`.
    pub fn new(
        grid: Grid,
        bg: &BackgroundField,
        nl: &AnalyticNonlinearity,
        config: &SolverConfig,
        h: f64,
    ) -> Result<Self> {
        if h == 0.0 || !h.is_finite() {
            return Err(Error::invalid(format!("step must be finite and nonzero, got {h}")));
        }
        if h < 0.0 && config.mu > 0.0 {
            return Err(Error::invalid("reverse steps need mu = 0"));
        }
        if config.mu < 0.0 {
            return Err(Error::invalid(format!("mu must be >= 0, got {}", config.mu)));
        }
        let flux = match config.dealias {
            DealiasRule::Auto => FluxEvaluator::new(grid, nl.clone()),
            DealiasRule::TwoThirds => FluxEvaluator::low_pass(grid, nl.clone()),
        };
        let xis = grid.wavenumbers();
        let nyq = grid.nyquist_bin();
        let ik = xis
            .iter()
            .enumerate()
            .map(|(k, &xi)| if k == nyq { ZERO } else { Complex64::new(0.0, xi) })
            .collect();
        let mu = config.mu;
        let lin: Vec<Complex64> = xis
            .iter()
            .map(|&xi| Complex64::new(-mu * xi * xi, xi * xi * xi))
            .collect();
        let coeffs = match config.scheme {
            Scheme::Etdrk4 => {
                let n = lin.len();
                let mut c = (
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                    Vec::with_capacity(n),
                );
                for &l in &lin {
                    let full = phi_functions(l * h, 3);
                    let half = phi_functions(l * (0.5 * h), 1);
                    c.0.push(full[0]);
                    c.1.push(half[0]);
                    c.2.push(half[1] * (0.5 * h));
                    c.3.push((full[1] - 3.0 * full[2] + 4.0 * full[3]) * h);
                    c.4.push((full[2] - 2.0 * full[3]) * h);
                    c.5.push((-full[2] + 4.0 * full[3]) * h);
                }
                Coefficients::Etd {
                    e: c.0,
                    e2: c.1,
                    q: c.2,
                    f1: c.3,
                    f2: c.4,
                    f3: c.5,
                }
            }
            Scheme::Ifrk4 => Coefficients::If {
                e: lin.iter().map(|l| (l * h).exp()).collect(),
                e2: lin.iter().map(|l| (l * (0.5 * h)).exp()).collect(),
            },
        };
        Ok(Self {
            grid,
            h,
            bg: bg.clone(),
            nl: nl.clone(),
            points: flux.evaluation_points(),
            flux,
            taper: grid.boundary_taper(config.buffer),
            tail_threshold: config.tail_threshold,
            ik,
            coeffs,
            cache: RefCell::new(Vec::new()),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn stage(&self, t: f64) -> Result<Arc<StageData>> {
        if let Some((_, d)) = self.cache.borrow().iter().find(|(s, _)| *s == t) {
            return Ok(d.clone());
        }
        let data = Arc::new(if self.bg.is_zero() {
            StageData {
                psi: vec![0.0; self.points.len()],
                forcing: vec![ZERO; self.grid.n()],
            }
        } else {
            let psi = self.bg.psi_at(t, &self.points)?;
            let s = self.bg.forcing_at(&self.nl, t, &self.grid.points())?;
            let tapered: Vec<f64> = s.iter().zip(&self.taper).map(|(a, w)| a * w).collect();
            StageData {
                psi,
                forcing: fft::forward_real(&tapered),
            }
        });
        let mut cache = self.cache.borrow_mut();
        if cache.len() >= 4 {
            cache.remove(0);
        }
        cache.push((t, data.clone()));
        Ok(data)
    }

    /// Coefficients of `-∂_x(f(u+Ψ) - f(Ψ)) - w·S` at time `t`.
    pub fn nonlinear_part(&self, u_hat: &SpectralField, t: f64) -> Result<Vec<Complex64>> {
        self.nonlinear(u_hat.coeffs(), t)
    }

    fn nonlinear(&self, v: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let data = self.stage(t)?;
        let flux = self.flux.apply(v, &data.psi);
        Ok(flux
            .iter()
            .zip(&self.ik)
            .zip(&data.forcing)
            .map(|((f, k), s)| -(k * f) - s)
            .collect())
    }

    /// Advances `state` by one step and checks the result.
    pub fn advance(&mut self, state: &mut SimulationState) -> Result<()> {
        self.grid.same_as(state.u_hat.grid())?;
        let t = state.t;
        let h = self.h;
        let v = state.u_hat.coeffs().to_vec();
        let next = match &self.coeffs {
            Coefficients::Etd { e, e2, q, f1, f2, f3 } => {
                let nv = self.nonlinear(&v, t)?;
                let a: Vec<Complex64> = (0..v.len()).map(|k| e2[k] * v[k] + q[k] * nv[k]).collect();
                let na = self.nonlinear(&a, t + 0.5 * h)?;
                let b: Vec<Complex64> = (0..v.len()).map(|k| e2[k] * v[k] + q[k] * na[k]).collect();
                let nb = self.nonlinear(&b, t + 0.5 * h)?;
                let c: Vec<Complex64> = (0..v.len())
                    .map(|k| e2[k] * a[k] + q[k] * (2.0 * nb[k] - nv[k]))
                    .collect();
                let nc = self.nonlinear(&c, t + h)?;
                (0..v.len())
                    .map(|k| e[k] * v[k] + f1[k] * nv[k] + f2[k] * (2.0 * (na[k] + nb[k])) + f3[k] * nc[k])
                    .collect::<Vec<_>>()
            }
            Coefficients::If { e, e2 } => {
                let k1 = self.nonlinear(&v, t)?;
                let a: Vec<Complex64> = (0..v.len()).map(|k| e2[k] * (v[k] + 0.5 * h * k1[k])).collect();
                let k2 = self.nonlinear(&a, t + 0.5 * h)?;
                let b: Vec<Complex64> = (0..v.len()).map(|k| e2[k] * v[k] + 0.5 * h * k2[k]).collect();
                let k3 = self.nonlinear(&b, t + 0.5 * h)?;
                let c: Vec<Complex64> = (0..v.len()).map(|k| e[k] * v[k] + h * e2[k] * k3[k]).collect();
                let k4 = self.nonlinear(&c, t + h)?;
                (0..v.len())
                    .map(|k| e[k] * v[k] + h / 6.0 * (e[k] * k1[k] + 2.0 * e2[k] * (k2[k] + k3[k]) + k4[k]))
                    .collect()
            }
        };
        state.step += 1;
        state.t = t + h;
        let field = SpectralField::new(self.grid, next)?;
        if !field.is_finite() {
            return Err(Error::Instability {
                step: state.step,
                t: state.t,
            });
        }
        super::check_perturbation(&field, self.tail_threshold, "perturbation")?;
        state.u_hat = field;
        Ok(())
    }
}
