//! Sobolev, frequency-enveloped and Bourgain norms, modulation projectors,
//! the extension operator, resonance checks and the refined Strichartz
//! certificate.

mod bourgain;
mod resonance;
mod strichartz;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use bourgain::{bourgain_norm, extend_rho_t, modulation_project, SpaceTimeSpectrum};
pub use resonance::{
    resonance, resonance_factorized, resonance_vanishing_check, resonance_witness, Block, ResonanceConfig,
    ResonanceReport,
};
pub use strichartz::{strichartz_certificate, StrichartzCertificate, KAPPA_1, KAPPA_2};

use crate::error::{Error, Result};
use crate::spectral::ops::bessel_potential;
use crate::spectral::{phi_n, DyadicBand, PhysicalField, SpectralField};

/// `‖J^s f‖_{L²}`.
pub fn sobolev_norm(f: &PhysicalField, s: f64) -> f64 {
    sobolev_norm_spectral(&f.transform(), s)
}

pub fn sobolev_norm_spectral(f: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        return f.l2_norm_sq().sqrt();
    }
    f.weighted_norm_sq(|xi| (1.0 + xi * xi).powf(s)).sqrt()
}

/// `sup |J^s(w·f)|` with `w` the grid's boundary window; a computable
/// stand-in for `‖f‖_{W^{s,∞}}`.
pub fn w_inf_proxy(f: &PhysicalField, s: f64, window: f64) -> f64 {
    let taper = f.grid().boundary_taper(window);
    let windowed: Vec<f64> = f.values().iter().zip(&taper).map(|(v, w)| v * w).collect();
    let g = PhysicalField::new(*f.grid(), windowed).expect("finite window");
    bessel_potential(&g.transform(), s).inverse().max_abs()
}

/// Dyadic frequency envelope `{ω_N}` on a band.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    band: DyadicBand,
    weights: Vec<f64>,
    eps: f64,
}

/// Config form of a [`WeightSequence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[derive(Default)]
pub enum WeightSpec {
    #[default]
    Unit,
    /// `ω_N ∝ (1 + (N/n0)²)^{ε/2}`, normalized to 1 at the low edge.
    Bracket { n0: f64, eps: f64 },
}

impl WeightSequence {
    pub fn unit(band: DyadicBand) -> Self {
        let len = (band.max_exp - band.min_exp + 1) as usize;
        Self {
            band,
            weights: vec![1.0; len],
            eps: 0.0,
        }
    }

    pub fn bracket(band: DyadicBand, n0: f64, eps: f64) -> Result<Self> {
        if !(n0 > 0.0) || !(eps >= 0.0) {
            return Err(Error::invalid(format!(
                "bracket weights need n0 > 0, eps >= 0 (got {n0}, {eps})"
            )));
        }
        let base = 1.0 + (band.n_min() / n0).powi(2);
        let weights = band
            .levels()
            .map(|n| ((1.0 + (n / n0).powi(2)) / base).powf(0.5 * eps))
            .collect();
        Self::from_weights(band, weights, eps)
    }

    pub fn from_spec(band: DyadicBand, spec: WeightSpec) -> Result<Self> {
        match spec {
            WeightSpec::Unit => Ok(Self::unit(band)),
            WeightSpec::Bracket { n0, eps } => Self::bracket(band, n0, eps),
        }
    }

    /// Validates `ω_N ≤ ω_{2N} ≤ 2^ε ω_N` and `ω = 1` at the low edge
    /// (within 1e-6).
    pub fn from_weights(band: DyadicBand, weights: Vec<f64>, eps: f64) -> Result<Self> {
        let len = (band.max_exp - band.min_exp + 1) as usize;
        if weights.len() != len {
            return Err(Error::invalid(format!(
                "{} weights for a band of {len} levels",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be positive and finite"));
        }
        if (weights[0] - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "weight at the low edge is {} (expected 1)",
                weights[0]
            )));
        }
        let cap = 2f64.powf(eps) * (1.0 + 1e-12);
        for w in weights.windows(2) {
            if w[1] < w[0] * (1.0 - 1e-12) || w[1] > cap * w[0] {
                return Err(Error::invalid(format!(
                    "consecutive weights {} -> {} violate w_N <= w_2N <= 2^eps w_N",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { band, weights, eps })
    }

    pub fn band(&self) -> DyadicBand {
        self.band
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `ω_N`; 1 below the band and the top weight above it.
    pub fn weight(&self, n: f64) -> f64 {
        let e = n.log2().round() as i32;
        if e < self.band.min_exp {
            1.0
        } else if e > self.band.max_exp {
            *self.weights.last().unwrap()
        } else {
            self.weights[(e - self.band.min_exp) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.band.levels().zip(self.weights.iter().copied())
    }
}

/// `‖f‖²_{H^s_ω} = ‖P_low f‖²_{H^s} + Σ_N ω_N² ‖P_N f‖²_{H^s}`.
pub fn enveloped_norm(f: &PhysicalField, s: f64, omega: &WeightSequence) -> Result<f64> {
    let band = DyadicBand::for_grid(f.grid());
    if band != omega.band() {
        return Err(Error::GridMismatch(format!(
            "weight band {:?} does not match grid band {band:?}",
            omega.band()
        )));
    }
    let spec = f.transform();
    Ok(spec
        .weighted_norm_sq(|xi| {
            let low = band.low_block(xi);
            let mut acc = low * low;
            for (n, w) in omega.iter() {
                let p = phi_n(n, xi);
                acc += w * w * p * p;
            }
            acc * (1.0 + xi * xi).powf(s)
        })
        .sqrt())
}

/// `(c₁, c₂)` with `c₁‖f‖_{H^s} ≤ ‖f‖_{H^s_1} ≤ c₂‖f‖_{H^s}`: square roots of
/// the extrema of `low² + Σ_N φ_N²` over `0 ≤ |ξ| ≤ N_max`.
pub fn unit_envelope_constants(band: DyadicBand) -> (f64, f64) {
    let samples = 200_000;
    let top = band.n_max();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..=samples {
        let xi = top * i as f64 / samples as f64;
        let l = band.low_block(xi);
        let v = l * l + band.levels().map(|n| phi_n(n, xi).powi(2)).sum::<f64>();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo.sqrt(), hi.sqrt())
}

/// `‖P_N f‖²_{L²}` for the low block (reported with `N = N_min/2`) and every
/// band level.
pub fn dyadic_block_masses(f: &SpectralField) -> Vec<(f64, f64)> {
    let band = DyadicBand::for_grid(f.grid());
    let mut out = vec![(0.5 * band.n_min(), f.weighted_norm_sq(|xi| band.low_block(xi).powi(2)))];
    for n in band.levels() {
        out.push((n, f.weighted_norm_sq(|xi| phi_n(n, xi).powi(2))));
    }
    out
}

/// `sup_y (1+y)^r e^{-a y}` over `y ≥ 0`, in closed form.
fn bracket_exp_sup(r: f64, a: f64) -> f64 {
    if r > a {
        let y = r / a - 1.0;
        ((1.0 + y).ln() * r - a * y).exp()
    } else {
        1.0
    }
}

/// `sup_ξ (1+ξ²)^{r/2} e^{-μξ²t}`, the operator norm of `W_μ(t)` from `H^s`
/// to `H^{s+r}`.
pub fn smoothing_symbol_sup(r: f64, mu: f64, t: f64) -> f64 {
    bracket_exp_sup(r, 2.0 * mu * t).sqrt()
}

/// Smallest `C_r` with `sup_ξ (1+ξ²)^{r/2} e^{-μξ²t} ≤ C_r (1 + (2μt)^{-r})^{1/2}`
/// for all `μt > 0`, found by 1-D maximization over `a = 2μt`.
pub fn smoothing_constant(r: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    let ratio = |la: f64| {
        let a = la.exp();
        bracket_exp_sup(r, a) / (1.0 + a.powf(-r))
    };
    // coarse scan in log a, then golden-section refinement
    let (lo, hi) = (-30.0f64, 30.0f64);
    let steps = 6000;
    let mut best = (lo, ratio(lo));
    for i in 0..=steps {
        let la = lo + (hi - lo) * i as f64 / steps as f64;
        let v = ratio(la);
        if v > best.1 {
            best = (la, v);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) > ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let peak = ratio(0.5 * (a + b)).max(best.1);
    // limits a → 0 and a → ∞
    let limit0 = (r * r.ln() - r).exp();
    peak.max(limit0).max(1.0).sqrt()
}

/// One row of a norm report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub name: String,
    pub s: f64,
    pub b: Option<f64>,
    pub value: f64,
    pub grid_id: String,
    pub window: String,
}

impl NormRow {
    pub const HEADER: &'static str = "name,s,b,value,grid_id,window";
}

impl fmt::Display for NormRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.b.map(|b| format!("{b}")).unwrap_or_default();
        write!(
            f,
            "{},{},{},{:.17e},{},{}",
            self.name, self.s, b, self.value, self.grid_id, self.window
        )
    }
}
