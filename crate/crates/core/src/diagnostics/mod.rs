//! Conserved and monitored functionals, and the experiments built on them.

mod experiments;


use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use experiments::{
    background_exactness, envelope_tail_monitor, flow_lipschitz_experiment, l2_growth_monitor, GrowthCheck,
    LipschitzRow, LipschitzTable, TailSeries,
};

use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::norms::{enveloped_norm, sobolev_norm_spectral, WeightSequence};
use crate::spectral::fft;
use crate::spectral::{Grid, PhysicalField, SpectralField, Trajectory};

/// Sample count on which `∫F(u)`-type integrands are summed: enough to
/// integrate a band-limited polynomial integrand exactly, `4n` otherwise.
fn quadrature_size(n: usize, nl: &AnalyticNonlinearity) -> usize {
    match nl.polynomial_degree() {
        Some(d) => ((d + 1) * n / 2 + 1).next_power_of_two().max(2 * n),
        None => 4 * n,
    }
}

/// `∫ g(x, u(x)) dx` by the mean over `m` equispaced samples of the
/// zero-padded `u`.
fn padded_integral(u: &SpectralField, m: usize, g: impl Fn(usize, f64) -> f64) -> f64 {
    let vals = fft::inverse_real(&fft::resample(u.coeffs(), m));
    let sum: f64 = vals.iter().enumerate().map(|(j, &v)| g(j, v)).sum();
    sum / m as f64 * u.grid().length()
}

fn gradient_sq(u: &SpectralField) -> f64 {
    u.weighted_norm_sq(|xi| xi * xi)
}

/// `(∫v, ∫v², ∫(v_x² - F(v)))`.
#[allow(non_snake_case)]
pub fn invariants_I(v: &PhysicalField, nl: &AnalyticNonlinearity) -> (f64, f64, f64) {
    let spec = v.transform();
    let i1 = spec.coeffs()[0].re * v.grid().length();
    let i2 = spec.l2_norm_sq();
    let m = quadrature_size(v.grid().n(), nl);
    let f = padded_integral(&spec, m, |_, u| nl.primitive(u));
    (i1, i2, gradient_sq(&spec) - f)
}

/// `E = ½∫u_x² - ∫(F(u+Ψ) - F(Ψ) - u f(Ψ))` at time `t`.
pub fn modified_energy(u: &PhysicalField, bg: &BackgroundField, nl: &AnalyticNonlinearity, t: f64) -> Result<f64> {
    let spec = u.transform();
    let grid = *u.grid();
    let m = quadrature_size(grid.n(), nl);
    let psi = bg.psi_at(t, &Grid::new(grid.half_length(), m)?.points())?;
    let pot = padded_integral(&spec, m, |j, v| nl.primitive_increment(psi[j], v));
    let e = 0.5 * gradient_sq(&spec) - pot;
    if !e.is_finite() {
        return Err(Error::NonFinite {
            context: "modified energy".into(),
        });
    }
    Ok(e)
}

/// Outcome of a falsifiable check, with the constants it was measured with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub constants: BTreeMap<String, f64>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            constants: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.constants {
            write!(f, " {k}={v:.6e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub energy: f64,
    pub hs: f64,
    pub hs_omega: f64,
    pub boundary_mass: f64,
}

impl DiagnosticsRow {
    pub const HEADER: &'static str = "t,I1,I2,I3,E,hs,hs_omega,boundary_mass";

    fn values(&self) -> [f64; 8] {
        [
            self.t,
            self.i1,
            self.i2,
            self.i3,
            self.energy,
            self.hs,
            self.hs_omega,
            self.boundary_mass,
        ]
    }
}

impl fmt::Display for DiagnosticsRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.values().iter().map(|v| format!("{v:.17e}")).collect();
        write!(f, "{}", cells.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub rows: Vec<DiagnosticsRow>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Serialize)]
struct VerdictFile<'a> {
    verdict: &'a [Verdict],
}

impl DiagnosticsReport {
    /// One row per stored frame.
    pub fn compute(
        traj: &Trajectory,
        bg: &BackgroundField,
        nl: &AnalyticNonlinearity,
        s: f64,
        omega: &WeightSequence,
        buffer: f64,
    ) -> Result<Self> {
        let rows = traj
            .frames()
            .iter()
            .enumerate()
            .map(|(m, u)| {
                let t = traj.time(m);
                let (i1, i2, i3) = invariants_I(u, nl);
                let spec = u.transform();
                Ok(DiagnosticsRow {
                    t,
                    i1,
                    i2,
                    i3,
                    energy: modified_energy(u, bg, nl, t)?,
                    hs: sobolev_norm_spectral(&spec, s),
                    hs_omega: enveloped_norm(u, s, omega)?,
                    boundary_mass: u.buffer_fraction(buffer).0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let report = Self {
            rows,
            verdicts: Vec::new(),
        };
        report.validate()?;
        Ok(report)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::invalid("diagnostic times must increase strictly"));
        }
        if self.rows.iter().any(|r| r.values().iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite {
                context: "diagnostics series".into(),
            });
        }
        Ok(())
    }

    pub fn push_verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// `(|ΔI₁|, |ΔI₂|/|I₂(0)|, |ΔI₃|/(1+|I₃(0)|))`, maximized over the rows.
    pub fn drifts(&self) -> (f64, f64, f64) {
        let Some(first) = self.rows.first() else {
            return (0.0, 0.0, 0.0);
        };
        let mut d = (0.0f64, 0.0f64, 0.0f64);
        for r in &self.rows {
            d.0 = d.0.max((r.i1 - first.i1).abs());
            if first.i2 != 0.0 {
                d.1 = d.1.max((r.i2 - first.i2).abs() / first.i2.abs());
            }
            d.2 = d.2.max((r.i3 - first.i3).abs() / (1.0 + first.i3.abs()));
        }
        d
    }

    /// Conservation check for runs without background.
    pub fn conservation_verdict(&self) -> Verdict {
        let (d1, d2, d3) = self.drifts();
        Verdict::new("conservation", d1 <= 1e-12 && d2 <= 1e-8 && d3 <= 1e-8)
            .with("drift_I1", d1)
            .with("rel_drift_I2", d2)
            .with("rel_drift_I3", d3)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(DiagnosticsRow::HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn verdicts_toml(&self) -> String {
        toml::to_string(&VerdictFile {
            verdict: &self.verdicts,
        })
        .expect("verdicts serialize")
    }
}
