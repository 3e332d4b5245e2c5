//! Time integration of the perturbation equation
//! `u_t = -u_xxx + μu_xx - ∂_x(f(u+Ψ) - f(Ψ)) - S`.
//!
//! The linear part is applied exactly through its Fourier multiplier
//! `e^{(iξ³ - μξ²)t}`; the nonlinear part and the forcing enter through an
//! exponential Runge–Kutta scheme. The forcing is multiplied by the grid's
//! boundary taper, since `S` need not decay (or be periodic) for
//! non-traveling backgrounds.

mod phi;
mod picard;
mod stepper;
mod viscosity;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

pub use phi::{phi, phi_functions};
pub use picard::{picard_solve, PicardReport, PICARD_MAX_ITER, PICARD_TOL};
pub use stepper::Stepper;
pub use viscosity::{vanishing_viscosity, ViscosityRow, ViscosityTable};

use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::spectral::ops::spatial_derivative;
use crate::spectral::{check_resolved, Grid, PhysicalField, SpectralField, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Cox–Matthews exponential time differencing, fourth order.
    #[default]
    Etdrk4,
    /// Integrating-factor classical Runge–Kutta.
    Ifrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DealiasRule {
    /// Zero-padding for polynomial fluxes, 2/3 low-pass otherwise.
    #[default]
    Auto,
    /// 2/3 low-pass for every flux.
    TwoThirds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub dealias: DealiasRule,
    /// Width of the boundary buffer as a fraction of `L`.
    #[serde(default = "default_buffer")]
    pub buffer: f64,
    /// Largest admissible spectral tail of `u` (see
    /// [`SpectralField::spectral_tail`]).
    #[serde(default = "default_tail")]
    pub tail_threshold: f64,
    /// Store every `save_every`-th step.
    #[serde(default = "default_save_every")]
    pub save_every: usize,
    /// Largest admissible fraction of the L² mass inside the buffer.
    #[serde(default = "default_contamination")]
    pub contamination_limit: f64,
}

fn default_buffer() -> f64 {
    0.1
}

fn default_tail() -> f64 {
    1e-8
}

fn default_save_every() -> usize {
    1
}

fn default_contamination() -> f64 {
    1e-6
}

/// Largest coefficient magnitude below which a perturbation counts as
/// roundoff and is exempt from the resolution check.
pub const RESOLUTION_FLOOR: f64 = 1e-12;

/// [`check_resolved`] for perturbations, skipped at roundoff level.
pub(crate) fn check_perturbation(field: &SpectralField, threshold: f64, what: &str) -> Result<()> {
    let peak = field.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak <= RESOLUTION_FLOOR {
        return Ok(());
    }
    check_resolved(field, threshold, what)
}

/// Absolute L² mass below which the buffer is never considered contaminated.
pub const CONTAMINATION_FLOOR: f64 = 1e-20;

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            scheme: Scheme::default(),
            dt,
            t_final,
            mu: 0.0,
            dealias: DealiasRule::default(),
            buffer: default_buffer(),
            tail_threshold: default_tail(),
            save_every: default_save_every(),
            contamination_limit: default_contamination(),
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_save_every(mut self, k: usize) -> Self {
        self.save_every = k;
        self
    }

    /// `0.4·dx³/π²`, a conservative default for the nonlinear term.
    pub fn suggested_dt(grid: &Grid) -> f64 {
        0.4 * grid.dx().powi(3) / std::f64::consts::PI.powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::invalid(msg)) };
        check(
            self.dt > 0.0 && self.dt.is_finite(),
            format!("dt must be positive, got {}", self.dt),
        )?;
        check(
            self.t_final > 0.0 && self.t_final.is_finite(),
            format!("horizon must be positive, got {}", self.t_final),
        )?;
        check(
            self.mu >= 0.0 && self.mu.is_finite(),
            format!("mu must be >= 0, got {}", self.mu),
        )?;
        check(
            self.buffer > 0.0 && self.buffer < 0.5,
            format!("buffer fraction must lie in (0, 0.5), got {}", self.buffer),
        )?;
        check(self.tail_threshold > 0.0, "tail threshold must be positive".into())?;
        check(self.save_every >= 1, "save_every must be at least 1".into())?;
        check(
            self.contamination_limit > 0.0,
            "contamination limit must be positive".into(),
        )
    }

    /// Step count (a multiple of `save_every`) and the step actually used,
    /// `t_final / steps ≤ dt`.
    pub fn lattice(&self) -> (usize, f64) {
        let per = self.dt * self.save_every as f64;
        let blocks = ((self.t_final / per) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let steps = blocks * self.save_every;
        (steps, self.t_final / steps as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub t: f64,
    pub step: usize,
    pub u_hat: SpectralField,
    /// Largest buffer mass fraction seen at a check.
    pub max_buffer_fraction: f64,
    /// Reference L² mass for the contamination test.
    reference_mass: f64,
}

impl SimulationState {
    pub fn new(u0: &PhysicalField, t0: f64) -> Self {
        let u_hat = u0.transform();
        let reference_mass = u_hat.l2_norm_sq();
        Self {
            t: t0,
            step: 0,
            u_hat,
            max_buffer_fraction: 0.0,
            reference_mass,
        }
    }

    pub fn u(&self) -> PhysicalField {
        self.u_hat.inverse()
    }

    /// Errors when the buffer holds more than `limit` of the L² mass
    /// (relative to the larger of the current and initial masses).
    pub fn check_boundary(&mut self, u: &PhysicalField, buffer: f64, limit: f64) -> Result<()> {
        let (inside, total) = u.buffer_fraction(buffer);
        let reference = total.max(self.reference_mass);
        if inside <= CONTAMINATION_FLOOR || reference == 0.0 {
            return Ok(());
        }
        let fraction = inside / reference;
        self.max_buffer_fraction = self.max_buffer_fraction.max(fraction);
        if fraction > limit {
            return Err(Error::BoundaryContamination {
                t: self.t,
                fraction,
                limit,
            });
        }
        Ok(())
    }
}

/// `-u_xxx + μu_xx - ∂_x(f(u+Ψ) - f(Ψ)) - w·S` on the grid of `u`, with `w`
/// the boundary taper of width `config.buffer`.
pub fn rhs(
    u: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    t: f64,
    config: &SolverConfig,
) -> Result<PhysicalField> {
    let spec = u.transform();
    check_perturbation(&spec, config.tail_threshold, "perturbation")?;
    let stepper = Stepper::new(*u.grid(), bg, nl, config, config.dt)?;
    let nonlinear = stepper.nonlinear_part(&spec, t)?;
    let mu = config.mu;
    let linear = spatial_derivative(&spec, 3)
        .scaled(-1.0)
        .add(&spatial_derivative(&spec, 2).scaled(mu))?;
    let out = SpectralField::new(*u.grid(), nonlinear)?.add(&linear)?;
    if !out.is_finite() {
        return Err(Error::NonFinite {
            context: "right-hand side".into(),
        });
    }
    Ok(out.inverse())
}

/// One step of size `config.dt` (builds a fresh [`Stepper`]; use one
/// directly for repeated steps).
pub fn step(
    state: &SimulationState,
    config: &SolverConfig,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
) -> Result<SimulationState> {
    config.validate()?;
    let mut stepper = Stepper::new(*state.u_hat.grid(), bg, nl, config, config.dt)?;
    let mut next = state.clone();
    stepper.advance(&mut next)?;
    Ok(next)
}

/// Integrates to `config.t_final`, storing every `save_every`-th step.
///
/// Failures after the first step are wrapped in [`Error::Aborted`] together
/// with the frames computed so far.
pub fn evolve(
    u0: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    config: &SolverConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let grid = *u0.grid();
    check_perturbation(&u0.transform(), config.tail_threshold, "initial data")?;
    bg.check_resolved(0.0, &grid)?;
    bg.check_resolved(config.t_final, &grid)?;
    let (steps, h) = config.lattice();
    let mut stepper = Stepper::new(grid, bg, nl, config, h)?;
    let mut state = SimulationState::new(u0, 0.0);
    state.check_boundary(u0, config.buffer, config.contamination_limit)?;
    let mut traj = Trajectory::empty(grid, 0.0, h * config.save_every as f64);
    traj.push(u0.clone())?;
    for _ in 0..steps {
        let outcome = stepper.advance(&mut state).and_then(|()| {
            if state.step.is_multiple_of(config.save_every) {
                let u = state.u();
                state.check_boundary(&u, config.buffer, config.contamination_limit)?;
                traj.push(u)?;
            }
            Ok(())
        });
        if let Err(cause) = outcome {
            return Err(Error::Aborted {
                cause: Box::new(cause),
                partial: Box::new(traj),
            });
        }
    }
    Ok(traj)
}
