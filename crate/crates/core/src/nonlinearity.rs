//! The real-analytic nonlinearity `f` of the gKdV flux, its first two
//! derivatives and its primitive `F(s) = ∫₀ˢ f`.
//!
//! Closed-form kinds are evaluated through their closed forms; the Taylor
//! coefficients are still carried (up to the truncation order) so that the
//! series view is available to every consumer. Custom series are evaluated
//! with Horner's rule on the truncated sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order for transcendental kinds.
pub const DEFAULT_ORDER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    Polynomial,
    Exponential,
    Sine,
    Cosine,
    CustomSeries,
}

/// Config-file form of a nonlinearity. Coefficients are listed lowest order
/// first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    Polynomial {
        coefficients: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
    },
    Exponential {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    Sine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    Cosine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    CustomSeries {
        coefficients: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticNonlinearity {
    kind: NonlinearityKind,
    coeffs: Vec<f64>,
}

/// Result of [`AnalyticNonlinearity::gwp_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwpBound {
    /// Sampled sup of `|f''|` over the working range.
    pub m: f64,
    /// Whether `|f''|` is bounded on all of ℝ (the global hypothesis), as
    /// opposed to merely finite on the sampled range.
    pub hypothesis_holds: bool,
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl AnalyticNonlinearity {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("polynomial needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("polynomial coefficients must be finite"));
        }
        Ok(Self {
            kind: NonlinearityKind::Polynomial,
            coeffs,
        })
    }

    /// `f(x) = x²`, the KdV flux.
    pub fn kdv() -> Self {
        Self::polynomial(vec![0.0, 0.0, 1.0]).unwrap()
    }

    /// `f(x) = sign·x³`; `sign = -1` is the defocusing mKdV flux.
    pub fn mkdv(sign: f64) -> Self {
        Self::polynomial(vec![0.0, 0.0, 0.0, sign]).unwrap()
    }

    /// `f(x) = x² − βx³`.
    pub fn gardner(beta: f64) -> Self {
        Self::polynomial(vec![0.0, 0.0, 1.0, -beta]).unwrap()
    }

    pub fn zero() -> Self {
        Self::polynomial(vec![0.0]).unwrap()
    }

    pub fn exponential(order: usize) -> Self {
        let coeffs = (0..=order).map(|k| 1.0 / factorial(k)).collect();
        Self {
            kind: NonlinearityKind::Exponential,
            coeffs,
        }
    }

    pub fn sine(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                if k % 2 == 1 {
                    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    sign / factorial(k)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            kind: NonlinearityKind::Sine,
            coeffs,
        }
    }

    pub fn cosine(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                if k % 2 == 0 {
                    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    sign / factorial(k)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            kind: NonlinearityKind::Cosine,
            coeffs,
        }
    }

    /// Truncated Taylor series `Σ_{k≤K} a_k x^k`.
    ///
    /// For `K ≥ 20` the last coefficient must satisfy `|a_K|^{1/K} ≤ 0.1`,
    /// a finite witness of an infinite radius of convergence.
    pub fn custom_series(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("series needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("series coefficients must be finite"));
        }
        let order = coeffs.len() - 1;
        if order >= 20 {
            let root = coeffs[order].abs().powf(1.0 / order as f64);
            if root > 0.1 {
                return Err(Error::invalid(format!(
                    "series tail |a_K|^(1/K) = {root:.3} exceeds 0.1 at K = {order}"
                )));
            }
        }
        Ok(Self {
            kind: NonlinearityKind::CustomSeries,
            coeffs,
        })
    }

    pub fn from_spec(spec: &NonlinearitySpec) -> Result<Self> {
        match spec {
            NonlinearitySpec::Polynomial { coefficients, degree } => {
                if let Some(d) = degree {
                    if coefficients.iter().skip(d + 1).any(|&c| c != 0.0) {
                        return Err(Error::invalid(format!(
                            "polynomial declared degree {d} has nonzero higher coefficients"
                        )));
                    }
                }
                Self::polynomial(coefficients.clone())
            }
            NonlinearitySpec::Exponential { order } => Ok(Self::exponential(order.unwrap_or(DEFAULT_ORDER))),
            NonlinearitySpec::Sine { order } => Ok(Self::sine(order.unwrap_or(DEFAULT_ORDER))),
            NonlinearitySpec::Cosine { order } => Ok(Self::cosine(order.unwrap_or(DEFAULT_ORDER))),
            NonlinearitySpec::CustomSeries { coefficients } => Self::custom_series(coefficients.clone()),
        }
    }

    pub fn to_spec(&self) -> NonlinearitySpec {
        let order = Some(self.order());
        match self.kind {
            NonlinearityKind::Polynomial => NonlinearitySpec::Polynomial {
                coefficients: self.coeffs.clone(),
                degree: None,
            },
            NonlinearityKind::Exponential => NonlinearitySpec::Exponential { order },
            NonlinearityKind::Sine => NonlinearitySpec::Sine { order },
            NonlinearityKind::Cosine => NonlinearitySpec::Cosine { order },
            NonlinearityKind::CustomSeries => NonlinearitySpec::CustomSeries {
                coefficients: self.coeffs.clone(),
            },
        }
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree of a polynomial kind (trailing zeros trimmed), `None` otherwise.
    pub fn polynomial_degree(&self) -> Option<usize> {
        if self.kind != NonlinearityKind::Polynomial {
            return None;
        }
        Some(self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0))
    }

    pub fn is_zero(&self) -> bool {
        self.kind == NonlinearityKind::Polynomial && self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// `f(x)` without the finiteness check; used on hot paths that check
    /// whole arrays afterwards.
    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Polynomial | NonlinearityKind::CustomSeries => horner(&self.coeffs, x),
            NonlinearityKind::Exponential => x.exp(),
            NonlinearityKind::Sine => x.sin(),
            NonlinearityKind::Cosine => x.cos(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Polynomial | NonlinearityKind::CustomSeries => horner_derivative(&self.coeffs, x),
            NonlinearityKind::Exponential => x.exp(),
            NonlinearityKind::Sine => x.cos(),
            NonlinearityKind::Cosine => -x.sin(),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Polynomial | NonlinearityKind::CustomSeries => {
                let mut acc = 0.0;
                for k in (2..self.coeffs.len()).rev() {
                    acc = acc * x + (k * (k - 1)) as f64 * self.coeffs[k];
                }
                acc
            }
            NonlinearityKind::Exponential => x.exp(),
            NonlinearityKind::Sine => -x.sin(),
            NonlinearityKind::Cosine => -x.cos(),
        }
    }

    pub fn primitive(&self, x: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Polynomial | NonlinearityKind::CustomSeries => {
                let mut acc = 0.0;
                for k in (0..self.coeffs.len()).rev() {
                    acc = acc * x + self.coeffs[k] / (k + 1) as f64;
                }
                acc * x
            }
            NonlinearityKind::Exponential => x.exp_m1(),
            NonlinearityKind::Sine => 1.0 - x.cos(),
            NonlinearityKind::Cosine => x.sin(),
        }
    }

    pub fn eval_f(&self, x: f64) -> Result<f64> {
        checked(self.value(x), "f")
    }

    pub fn eval_fp(&self, x: f64) -> Result<f64> {
        checked(self.derivative(x), "f'")
    }

    pub fn eval_fpp(&self, x: f64) -> Result<f64> {
        checked(self.second_derivative(x), "f''")
    }

    #[allow(non_snake_case)]
    pub fn eval_F(&self, x: f64) -> Result<f64> {
        checked(self.primitive(x), "F")
    }

    /// Sampled `sup |f''|` on `[lo, hi]` and whether `|f''|` is globally
    /// bounded.
    pub fn gwp_bound(&self, lo: f64, hi: f64) -> GwpBound {
        const SAMPLES: usize = 20_001;
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let m = (0..SAMPLES)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64;
                self.second_derivative(x).abs()
            })
            .fold(0.0, f64::max);
        let hypothesis_holds = m.is_finite()
            && match self.kind {
                NonlinearityKind::Polynomial => self.polynomial_degree().unwrap_or(0) <= 2,
                NonlinearityKind::Sine | NonlinearityKind::Cosine => true,
                NonlinearityKind::Exponential => false,
                // Truncated series are polynomials of their order.
                NonlinearityKind::CustomSeries => self.coeffs.iter().skip(3).all(|&c| c == 0.0),
            };
        GwpBound { m, hypothesis_holds }
    }
}

impl AnalyticNonlinearity {
    /// Taylor coefficients of `f` about `psi`: `c_k = f^{(k)}(psi)/k!`.
    ///
    /// Exact (finite) for polynomial and series kinds; closed-form kinds are
    /// expanded to `SHIFT_TERMS` terms.
    pub fn shifted_coeffs(&self, psi: f64) -> Vec<f64> {
        match self.kind {
            NonlinearityKind::Polynomial | NonlinearityKind::CustomSeries => taylor_shift(&self.coeffs, psi),
            _ => {
                let cycle: [f64; 4] = match self.kind {
                    NonlinearityKind::Exponential => {
                        let e = psi.exp();
                        [e, e, e, e]
                    }
                    NonlinearityKind::Sine => {
                        let (s, c) = psi.sin_cos();
                        [s, c, -s, -c]
                    }
                    _ => {
                        let (s, c) = psi.sin_cos();
                        [c, -s, -c, s]
                    }
                };
                let mut inv_fact = 1.0;
                (0..SHIFT_TERMS)
                    .map(|k| {
                        if k > 0 {
                            inv_fact /= k as f64;
                        }
                        cycle[k % 4] * inv_fact
                    })
                    .collect()
            }
        }
    }

    /// `f(psi + u) - f(psi)` without cancellation when `|u| ≪ |psi|`.
    pub fn increment(&self, psi: f64, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        if self.closed_form() && u.abs() > 1.0 {
            return self.value(psi + u) - self.value(psi);
        }
        let c = self.shifted_coeffs(psi);
        let mut acc = 0.0;
        for k in (1..c.len()).rev() {
            acc = acc * u + c[k];
        }
        acc * u
    }

    /// `F(psi + u) - F(psi) - u f(psi)`, quadratic in `u` near zero.
    pub fn primitive_increment(&self, psi: f64, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        if self.closed_form() && u.abs() > 1.0 {
            return self.primitive(psi + u) - self.primitive(psi) - u * self.value(psi);
        }
        let c = self.shifted_coeffs(psi);
        let mut acc = 0.0;
        for k in (1..c.len()).rev() {
            acc = acc * u + c[k] / (k + 1) as f64;
        }
        acc * u * u
    }

    fn closed_form(&self) -> bool {
        matches!(
            self.kind,
            NonlinearityKind::Exponential | NonlinearityKind::Sine | NonlinearityKind::Cosine
        )
    }
}

const SHIFT_TERMS: usize = 32;

/// Coefficients of `p(x + a)` from those of `p(x)` (repeated synthetic
/// division).
fn taylor_shift(coeffs: &[f64], a: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            c[k] += a * c[k + 1];
        }
    }
    c
}

/// Working range for [`AnalyticNonlinearity::gwp_bound`]: the attained
/// `[min, max]` padded by 10% of its width (at least 10% of the magnitude).
pub fn padded_range(min: f64, max: f64) -> (f64, f64) {
    let width = (max - min).abs();
    let pad = 0.1 * width.max(max.abs().max(min.abs())).max(f64::MIN_POSITIVE);
    (min - pad, max + pad)
}

fn checked(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            context: format!("evaluation of {what}"),
        })
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..coeffs.len()).rev() {
        acc = acc * x + k as f64 * coeffs[k];
    }
    acc
}
