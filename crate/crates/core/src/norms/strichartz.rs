//! Refined Strichartz certificate for solutions of `u_t + u_xxx = F`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::sobolev_norm_spectral;
use crate::spectral::{SpectralField, Trajectory};

/// Time exponents for the `κ = 1/2` instance: `T^{1/2-κ/4}` and `T^{3κ/4}`.
pub const KAPPA_1: f64 = 0.375;
pub const KAPPA_2: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzCertificate {
    /// `‖u‖_{L²_T L^∞_x}`.
    pub lhs: f64,
    /// `T^{κ₁} ‖J^{-(1-δ)/4+θ} u‖_{L^∞_T L²}`.
    pub rhs1: f64,
    /// `T^{κ₂} ‖J^{-(1+3δ)/4+θ} F‖_{L²_T L²}`.
    pub rhs2: f64,
    /// Relative defect of the trapezoidal Duhamel step.
    pub residual: f64,
}

impl StrichartzCertificate {
    /// `lhs / (rhs1 + rhs2)`, 0 for the zero solution.
    pub fn ratio(&self) -> f64 {
        let r = self.rhs1 + self.rhs2;
        if r == 0.0 {
            0.0
        } else {
            self.lhs / r
        }
    }

    pub fn holds(&self, c: f64) -> bool {
        self.lhs <= c * (self.rhs1 + self.rhs2)
    }
}

fn trapezoid(dt: f64, v: &[f64]) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => dt * (v[1..n - 1].iter().sum::<f64>() + 0.5 * (v[0] + v[n - 1])),
    }
}

fn airy(f: &SpectralField, t: f64) -> SpectralField {
    f.multiplied(|xi| Complex64::from_polar(1.0, t * xi * xi * xi))
}

/// Checks that `u` solves `u_t + u_xxx = F` to within `tolerance` (relative
/// defect of the trapezoidal Duhamel step), then evaluates the certificate.
pub fn strichartz_certificate(
    u: &Trajectory,
    forcing: &Trajectory,
    delta: f64,
    theta: f64,
    tolerance: f64,
) -> Result<StrichartzCertificate> {
    if !(delta >= 0.0 && theta > 0.0) {
        return Err(Error::invalid(format!(
            "need delta >= 0 and theta > 0 (got {delta}, {theta})"
        )));
    }
    u.grid().same_as(forcing.grid())?;
    if u.len() != forcing.len() || (u.dt() - forcing.dt()).abs() > 1e-14 || u.len() < 2 {
        return Err(Error::GridMismatch(
            "solution and forcing need the same time lattice with at least two frames".into(),
        ));
    }
    let dt = u.dt();
    let us: Vec<SpectralField> = u.frames().iter().map(|f| f.transform()).collect();
    let fs: Vec<SpectralField> = forcing.frames().iter().map(|f| f.transform()).collect();

    let mut defect = 0.0f64;
    for m in 0..us.len() - 1 {
        let pred = airy(&us[m], dt).add(&airy(&fs[m], dt).add(&fs[m + 1])?.scaled(0.5 * dt))?;
        defect = defect.max(us[m + 1].sub(&pred)?.l2_norm_sq().sqrt());
    }
    let u_sup = us.iter().map(|f| f.l2_norm_sq().sqrt()).fold(0.0, f64::max);
    let f_sup = fs.iter().map(|f| f.l2_norm_sq().sqrt()).fold(0.0, f64::max);
    let size = u_sup + dt * f_sup;
    let residual = if size == 0.0 { 0.0 } else { defect / size };
    if residual > tolerance {
        return Err(Error::ResidualTooLarge { residual, tolerance });
    }

    let span = u.span();
    let sup_sq: Vec<f64> = u.frames().iter().map(|f| f.max_abs().powi(2)).collect();
    let lhs = trapezoid(dt, &sup_sq).sqrt();
    let s1 = -(1.0 - delta) / 4.0 + theta;
    let rhs1 = span.powf(KAPPA_1) * us.iter().map(|f| sobolev_norm_spectral(f, s1)).fold(0.0, f64::max);
    let s2 = -(1.0 + 3.0 * delta) / 4.0 + theta;
    let f_sq: Vec<f64> = fs.iter().map(|f| sobolev_norm_spectral(f, s2).powi(2)).collect();
    let rhs2 = span.powf(KAPPA_2) * trapezoid(dt, &f_sq).sqrt();
    Ok(StrichartzCertificate {
        lhs,
        rhs1,
        rhs2,
        residual,
    })
}
