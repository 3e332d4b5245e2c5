use rayon::prelude::*;

use super::{evolve, SolverConfig};
use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::norms::sobolev_norm;
use crate::spectral::{PhysicalField, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscosityRow {
    pub mu: f64,
    /// `sup_t ‖u_μ - u_0‖_{H^{s-1}}`.
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityTable {
    pub rows: Vec<ViscosityRow>,
    /// Least-squares slope of `log difference` against `log μ` over the last
    /// three positive `μ`.
    pub rate: Option<f64>,
}

impl ViscosityTable {
    /// Whether differences decrease along the positive `μ`, allowing each to
    /// exceed its predecessor by at most `noise` (relative).
    pub fn monotone(&self, noise: f64) -> bool {
        let d: Vec<f64> = self.rows.iter().filter(|r| r.mu > 0.0).map(|r| r.difference).collect();
        d.windows(2).all(|w| w[1] <= w[0] * (1.0 + noise))
    }
}

fn sup_difference(a: &Trajectory, b: &Trajectory, s: f64) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(d.sup_norm(|f| sobolev_norm(f, s - 1.0)))
}

fn fit_rate(rows: &[ViscosityRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mu > 0.0 && r.difference > 0.0)
        .map(|r| (r.mu.ln(), r.difference.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let pts = &pts[pts.len() - 3..];
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Runs `evolve` for every `μ` (in parallel) and compares each run with the
/// `μ = 0` run. The list must decrease strictly and end at 0.
pub fn vanishing_viscosity(
    u0: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    base: &SolverConfig,
    mus: &[f64],
    s: f64,
) -> Result<ViscosityTable> {
    if mus.len() < 2 || *mus.last().unwrap() != 0.0 {
        return Err(Error::invalid(
            "viscosity list must have at least two entries and end at 0",
        ));
    }
    if mus.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::invalid("viscosity list must decrease strictly"));
    }
    let runs: Vec<Trajectory> = mus
        .par_iter()
        .map(|&mu| evolve(u0, bg, nl, &base.clone().with_mu(mu)))
        .collect::<Result<_>>()?;
    let limit = runs.last().unwrap();
    let rows = mus
        .iter()
        .zip(&runs)
        .map(|(&mu, run)| {
            Ok(ViscosityRow {
                mu,
                difference: sup_difference(run, limit, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = fit_rate(&rows);
    Ok(ViscosityTable { rows, rate })
}
