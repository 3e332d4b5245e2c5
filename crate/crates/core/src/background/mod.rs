//! Background fields `Ψ(t, x)`: exact traveling waves, the synthetic
//! non-symmetric example, tabulated profiles, and the Gaussian split of
//! bounded data.

mod elliptic;
mod tabulated;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use elliptic::{complete_k, jacobi_cn_dn, jacobi_sn_cn_dn};
pub use tabulated::TabulatedProfile;

use crate::error::{Error, Result};
use crate::nonlinearity::AnalyticNonlinearity;
use crate::spectral::ops::bessel_potential;
use crate::spectral::{check_resolved, Grid, PhysicalField};
use elliptic::sn_cn_dn_param;

/// Window (boundary-buffer fraction) applied before spectral checks of
/// non-decaying quantities.
pub const CHECK_WINDOW: f64 = 0.25;
/// Spectral-tail threshold for a grid to count as resolving `Ψ_x`.
pub const RESOLUTION_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[serde(alias = "+")]
    Plus,
    #[serde(alias = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackgroundSpec {
    Zero,
    /// `±√c tanh(√(c/2)(x + ct))`, exact for `f = -x³`.
    MkdvKink {
        c: f64,
        sign: Sign,
    },
    /// `1/(3β) ± β^{-1/2} √c tanh(√(c/2)(x + (c - 1/(3β))t))`, exact for
    /// `f = x² - βx³`.
    GardnerKink {
        c: f64,
        beta: f64,
        sign: Sign,
    },
    /// `α + β cn²(γ(x - ct), κ)`; parameters resolved against `f`.
    KdvCnoidal {
        c: f64,
        kappa: f64,
    },
    /// `β dn(γ(x - ct), κ)`; parameters resolved against `f`.
    MkdvDnoidal {
        c: f64,
        kappa: f64,
    },
    /// `1 + 4 tanh(x + t) + cos(log(1 + x² + t²))`.
    Synthetic,
    Tabulated {
        path: PathBuf,
    },
}

/// `(Ψ, ∂_tΨ, ∂_xΨ, ∂_x²Ψ, ∂_x³Ψ)` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub psi: f64,
    pub psi_t: f64,
    pub psi_x: f64,
    pub psi_xx: f64,
    pub psi_xxx: f64,
}

/// Resolved parameters of a periodic traveling wave. `alpha` is zero for
/// the dnoidal profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// `max |S| / max |Ψ|` over one period, from the residual oracle.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Zero,
    /// `a + b tanh(k(x + w t))`
    Kink {
        a: f64,
        b: f64,
        k: f64,
        w: f64,
    },
    Cnoidal {
        p: WaveParameters,
        c: f64,
    },
    Dnoidal {
        p: WaveParameters,
        c: f64,
    },
    Synthetic,
    Tabulated(TabulatedProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundField {
    spec: BackgroundSpec,
    profile: Profile,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

fn open_unit(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("modulus must lie in (0, 1), got {v}")))
    }
}

impl BackgroundField {
    /// Builds the field. `nl` is only consulted by the periodic waves, whose
    /// parameters depend on the flux.
    pub fn new(spec: BackgroundSpec, nl: &AnalyticNonlinearity) -> Result<Self> {
        let profile = match &spec {
            BackgroundSpec::Zero => Profile::Zero,
            &BackgroundSpec::MkdvKink { c, sign } => {
                positive("c", c)?;
                Profile::Kink {
                    a: 0.0,
                    b: sign.value() * c.sqrt(),
                    k: (0.5 * c).sqrt(),
                    w: c,
                }
            }
            &BackgroundSpec::GardnerKink { c, beta, sign } => {
                positive("c", c)?;
                positive("beta", beta)?;
                Profile::Kink {
                    a: 1.0 / (3.0 * beta),
                    b: sign.value() * (c / beta).sqrt(),
                    k: (0.5 * c).sqrt(),
                    w: c - 1.0 / (3.0 * beta),
                }
            }
            &BackgroundSpec::KdvCnoidal { c, kappa } => {
                positive("c", c)?;
                open_unit(kappa)?;
                Profile::Cnoidal {
                    p: resolve_cnoidal(c, kappa, nl)?,
                    c,
                }
            }
            &BackgroundSpec::MkdvDnoidal { c, kappa } => {
                positive("c", c)?;
                open_unit(kappa)?;
                Profile::Dnoidal {
                    p: resolve_dnoidal(c, kappa, nl)?,
                    c,
                }
            }
            BackgroundSpec::Synthetic => Profile::Synthetic,
            BackgroundSpec::Tabulated { path } => Profile::Tabulated(TabulatedProfile::load(path)?),
        };
        Ok(Self { spec, profile })
    }

    pub fn zero() -> Self {
        Self {
            spec: BackgroundSpec::Zero,
            profile: Profile::Zero,
        }
    }

    /// A static background from an in-memory profile.
    pub fn tabulated(profile: TabulatedProfile, path: PathBuf) -> Self {
        Self {
            spec: BackgroundSpec::Tabulated { path },
            profile: Profile::Tabulated(profile),
        }
    }

    pub fn spec(&self) -> &BackgroundSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile, Profile::Zero)
    }

    /// True when `Ψ` does not depend on `t`.
    pub fn is_static(&self) -> bool {
        matches!(self.profile, Profile::Zero | Profile::Tabulated(_))
    }

    /// Propagation speed `v` of a traveling wave, `Ψ_t = -v Ψ_x`.
    pub fn velocity(&self) -> Option<f64> {
        match &self.profile {
            Profile::Kink { w, .. } => Some(-w),
            Profile::Cnoidal { c, .. } | Profile::Dnoidal { c, .. } => Some(*c),
            Profile::Zero => Some(0.0),
            _ => None,
        }
    }

    pub fn wave_parameters(&self) -> Option<WaveParameters> {
        match &self.profile {
            Profile::Cnoidal { p, .. } | Profile::Dnoidal { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn eval_jet(&self, t: f64, x: f64) -> Result<Jet> {
        Ok(match &self.profile {
            Profile::Zero => Jet::default(),
            &Profile::Kink { a, b, k, w } => {
                let th = (k * (x + w * t)).tanh();
                let s = 1.0 - th * th;
                let psi_x = b * k * s;
                Jet {
                    psi: a + b * th,
                    psi_t: w * psi_x,
                    psi_x,
                    psi_xx: -2.0 * b * k * k * s * th,
                    psi_xxx: 2.0 * b * k * k * k * s * (3.0 * th * th - 1.0),
                }
            }
            &Profile::Cnoidal { p, c } => {
                let m = p.kappa * p.kappa;
                let g = p.gamma;
                let (sn, cn, dn) = sn_cn_dn_param(g * (x - c * t), m);
                let y = cn * cn;
                let y1 = -2.0 * sn * cn * dn;
                let y2 = 2.0 * (1.0 - m) + 4.0 * (2.0 * m - 1.0) * y - 6.0 * m * y * y;
                let y3 = (4.0 * (2.0 * m - 1.0) - 12.0 * m * y) * y1;
                let psi_x = p.beta * g * y1;
                Jet {
                    psi: p.alpha + p.beta * y,
                    psi_t: -c * psi_x,
                    psi_x,
                    psi_xx: p.beta * g * g * y2,
                    psi_xxx: p.beta * g * g * g * y3,
                }
            }
            &Profile::Dnoidal { p, c } => {
                let m = p.kappa * p.kappa;
                let g = p.gamma;
                let (sn, cn, dn) = sn_cn_dn_param(g * (x - c * t), m);
                let d1 = -m * sn * cn;
                let d2 = (2.0 - m) * dn - 2.0 * dn * dn * dn;
                let d3 = ((2.0 - m) - 6.0 * dn * dn) * d1;
                let psi_x = p.beta * g * d1;
                Jet {
                    psi: p.beta * dn,
                    psi_t: -c * psi_x,
                    psi_x,
                    psi_xx: p.beta * g * g * d2,
                    psi_xxx: p.beta * g * g * g * d3,
                }
            }
            Profile::Synthetic => synthetic_jet(t, x),
            Profile::Tabulated(table) => {
                let [s, s1, s2, s3] = table.eval(x)?;
                Jet {
                    psi: s,
                    psi_t: 0.0,
                    psi_x: s1,
                    psi_xx: s2,
                    psi_xxx: s3,
                }
            }
        })
    }

    pub fn psi(&self, t: f64, x: f64) -> Result<f64> {
        match &self.profile {
            Profile::Zero => Ok(0.0),
            &Profile::Kink { a, b, k, w } => Ok(a + b * (k * (x + w * t)).tanh()),
            Profile::Synthetic => Ok(1.0 + 4.0 * (x + t).tanh() + (1.0 + x * x + t * t).ln().cos()),
            _ => self.eval_jet(t, x).map(|j| j.psi),
        }
    }

    /// `Ψ(t, ·)` at arbitrary abscissae.
    pub fn psi_at(&self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Ok(vec![0.0; xs.len()]);
        }
        xs.iter().map(|&x| self.psi(t, x)).collect()
    }

    pub fn sample_psi(&self, t: f64, grid: &Grid) -> Result<PhysicalField> {
        PhysicalField::new(*grid, self.psi_at(t, &grid.points())?)
    }

    pub fn sample_jet(&self, t: f64, grid: &Grid) -> Result<Vec<Jet>> {
        grid.points().iter().map(|&x| self.eval_jet(t, x)).collect()
    }

    /// `S = Ψ_t + Ψ_xxx + f'(Ψ)Ψ_x` at arbitrary abscissae, no resolution
    /// check.
    pub fn forcing_at(&self, nl: &AnalyticNonlinearity, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        if self.is_zero() {
            return Ok(vec![0.0; xs.len()]);
        }
        let out: Vec<f64> = xs
            .iter()
            .map(|&x| {
                self.eval_jet(t, x)
                    .map(|j| j.psi_t + j.psi_xxx + nl.derivative(j.psi) * j.psi_x)
            })
            .collect::<Result<_>>()?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "background residual".into(),
            });
        }
        Ok(out)
    }

    /// Errors with [`Error::Unresolved`] when the windowed `Ψ_x` has
    /// spectral tail above [`RESOLUTION_TAIL`].
    pub fn check_resolved(&self, t: f64, grid: &Grid) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        let taper = grid.boundary_taper(CHECK_WINDOW);
        let dx: Vec<f64> = self
            .sample_jet(t, grid)?
            .iter()
            .zip(&taper)
            .map(|(j, w)| j.psi_x * w)
            .collect();
        let field = PhysicalField::new(*grid, dx)?;
        check_resolved(&field.transform(), RESOLUTION_TAIL, "background derivative")
    }

    /// The forcing of the perturbation equation sampled on `grid`.
    #[allow(non_snake_case)]
    pub fn residual_S(&self, nl: &AnalyticNonlinearity, t: f64, grid: &Grid) -> Result<PhysicalField> {
        self.check_resolved(t, grid)?;
        PhysicalField::new(*grid, self.forcing_at(nl, t, &grid.points())?)
    }

    /// Numerical proxies for the background hypotheses at regularity `s`,
    /// each measured on `grid` and on its 2× refinement over
    /// `t ∈ {0, 1/2, 1}`.
    pub fn check_hypotheses(&self, nl: &AnalyticNonlinearity, grid: &Grid, s: f64) -> Result<HypothesisReport> {
        if s <= 0.5 {
            return Err(Error::invalid(format!("regularity s = {s} must exceed 1/2")));
        }
        let fine = grid.refined(2)?;
        let measure = |g: &Grid| -> Result<[f64; 3]> {
            let taper = g.boundary_taper(CHECK_WINDOW);
            let xs = g.points();
            let mut out = [0.0f64; 3];
            for &t in &[0.0, 0.5, 1.0] {
                let jets: Vec<Jet> = xs.iter().map(|&x| self.eval_jet(t, x)).collect::<Result<_>>()?;
                let sup_t = jets.iter().map(|j| j.psi_t.abs()).fold(0.0, f64::max);
                let windowed: Vec<f64> = jets.iter().zip(&taper).map(|(j, w)| j.psi * w).collect();
                let w_proxy =
                    bessel_potential(&PhysicalField::new(*g, windowed)?.transform(), s + 1.0 + HYPOTHESIS_EPS)
                        .inverse()
                        .max_abs();
                let forcing: Vec<f64> = self
                    .forcing_at(nl, t, &xs)?
                    .iter()
                    .zip(&taper)
                    .map(|(v, w)| v * w)
                    .collect();
                let spec = PhysicalField::new(*g, forcing)?.transform();
                let hs = spec
                    .weighted_norm_sq(|xi| (1.0 + xi * xi).powf(s + HYPOTHESIS_EPS))
                    .sqrt();
                out[0] = out[0].max(sup_t);
                out[1] = out[1].max(w_proxy);
                out[2] = out[2].max(hs);
            }
            Ok(out)
        };
        let coarse = measure(grid)?;
        let refined = measure(&fine)?;
        let proxy = |i: usize| Proxy::new(coarse[i], refined[i]);
        Ok(HypothesisReport {
            sup_psi_t: proxy(0),
            w_proxy: proxy(1),
            forcing_norm: proxy(2),
        })
    }
}

/// Extra regularity `ε` used by the hypothesis proxies.
pub const HYPOTHESIS_EPS: f64 = 0.1;

/// One proxy measured at two resolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proxy {
    pub coarse: f64,
    pub fine: f64,
    /// Finite and not growing (more than 10%) under refinement.
    pub finite: bool,
}

impl Proxy {
    fn new(coarse: f64, fine: f64) -> Self {
        let finite = coarse.is_finite() && fine.is_finite() && fine <= 1.1 * coarse + 1e-12;
        Self { coarse, fine, finite }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisReport {
    /// `sup |∂_tΨ|`
    pub sup_psi_t: Proxy,
    /// `sup |J^{s+1+ε}(window·Ψ)|`
    pub w_proxy: Proxy,
    /// `‖window·S‖_{H^{s+ε}}`
    pub forcing_norm: Proxy,
}

impl HypothesisReport {
    pub fn all_finite(&self) -> bool {
        self.sup_psi_t.finite && self.w_proxy.finite && self.forcing_norm.finite
    }
}

fn synthetic_jet(t: f64, x: f64) -> Jet {
    let th = (x + t).tanh();
    let s = 1.0 - th * th;
    let q = 1.0 + t * t;
    let r = x * x + q;
    let g = r.ln();
    let g1 = 2.0 * x / r;
    let g2 = 2.0 * (q - x * x) / (r * r);
    let g3 = (4.0 * x * x * x - 12.0 * x * q) / (r * r * r);
    let (sg, cg) = g.sin_cos();
    Jet {
        psi: 1.0 + 4.0 * th + cg,
        psi_t: 4.0 * s - sg * 2.0 * t / r,
        psi_x: 4.0 * s - sg * g1,
        psi_xx: -8.0 * th * s - cg * g1 * g1 - sg * g2,
        psi_xxx: 4.0 * s * (6.0 * th * th - 2.0) + sg * (g1 * g1 * g1 - g3) - 3.0 * cg * g1 * g2,
    }
}

/// Relative traveling-wave residual `max|S|/max|Ψ|` over one spatial
/// period at `t = 0`, from the analytic jet.
fn wave_residual(profile: &Profile, nl: &AnalyticNonlinearity, period: f64) -> f64 {
    let field = BackgroundField {
        spec: BackgroundSpec::Zero,
        profile: profile.clone(),
    };
    let samples = 2001;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..samples {
        let x = period * i as f64 / (samples - 1) as f64;
        let j = field.eval_jet(0.0, x).expect("analytic profile");
        worst = worst.max((j.psi_t + j.psi_xxx + nl.derivative(j.psi) * j.psi_x).abs());
        peak = peak.max(j.psi.abs());
    }
    if peak == 0.0 {
        worst
    } else {
        worst / peak
    }
}

/// Tolerance of the residual oracle used to accept resolved parameters.
pub const WAVE_TOLERANCE: f64 = 1e-8;

/// Parameters of `α + β cn²(γ(x - ct), κ)` for `f = a₀ + a₁x + a₂x²`,
/// `a₂ ≠ 0`.
///
/// Matching powers of `cn²` in the integrated profile equation fixes `β`
/// and `α` in terms of `γ`; the remaining freedom is fixed by `γ = √c/2`,
/// which for `f = x²` tends to the KdV soliton as `κ → 1`.
pub fn resolve_cnoidal(c: f64, kappa: f64, nl: &AnalyticNonlinearity) -> Result<WaveParameters> {
    positive("c", c)?;
    open_unit(kappa)?;
    let coeffs = nl.coeffs();
    let deg = nl.polynomial_degree();
    if deg != Some(2) {
        return Err(Error::NoAdmissibleParameters {
            reason: "cnoidal profile needs a quadratic polynomial flux".into(),
            residual: f64::INFINITY,
        });
    }
    let (a1, a2) = (coeffs[1], coeffs[2]);
    let m = kappa * kappa;
    let gamma = 0.5 * c.sqrt();
    let g2 = gamma * gamma;
    let p = WaveParameters {
        alpha: (c - a1 - 4.0 * (2.0 * m - 1.0) * g2) / (2.0 * a2),
        beta: 6.0 * m * g2 / a2,
        gamma,
        kappa,
        residual: 0.0,
    };
    accept(Profile::Cnoidal { p, c }, nl, 2.0 * complete_k(kappa)? / gamma)
}

/// Parameters of `β dn(γ(x - ct), κ)` for `f = a₀ + a₁x + a₃x³` with
/// `a₃ > 0` (focusing) and `c > a₁`.
pub fn resolve_dnoidal(c: f64, kappa: f64, nl: &AnalyticNonlinearity) -> Result<WaveParameters> {
    positive("c", c)?;
    open_unit(kappa)?;
    let coeffs = nl.coeffs();
    if nl.polynomial_degree() != Some(3) || coeffs[2] != 0.0 {
        return Err(Error::NoAdmissibleParameters {
            reason: "dnoidal profile needs a flux a0 + a1 x + a3 x^3".into(),
            residual: f64::INFINITY,
        });
    }
    let (a1, a3) = (coeffs[1], coeffs[3]);
    let m = kappa * kappa;
    let shifted = c - a1;
    if a3 <= 0.0 || shifted <= 0.0 {
        // Report how badly the focusing profile of the same size fails.
        let gamma = (shifted.abs() / (2.0 - m)).sqrt().max(f64::MIN_POSITIVE);
        let p = WaveParameters {
            alpha: 0.0,
            beta: (2.0 / a3.abs().max(f64::MIN_POSITIVE)).sqrt() * gamma,
            gamma,
            kappa,
            residual: 0.0,
        };
        let residual = wave_residual(&Profile::Dnoidal { p, c }, nl, 2.0 * complete_k(kappa)? / gamma);
        return Err(Error::NoAdmissibleParameters {
            reason: if a3 <= 0.0 {
                "dnoidal waves need a focusing cubic (a3 > 0)".into()
            } else {
                "dnoidal waves need c > a1".into()
            },
            residual,
        });
    }
    let gamma = (shifted / (2.0 - m)).sqrt();
    let p = WaveParameters {
        alpha: 0.0,
        beta: (2.0 / a3).sqrt() * gamma,
        gamma,
        kappa,
        residual: 0.0,
    };
    accept(Profile::Dnoidal { p, c }, nl, 2.0 * complete_k(kappa)? / gamma)
}

fn accept(profile: Profile, nl: &AnalyticNonlinearity, period: f64) -> Result<WaveParameters> {
    let residual = wave_residual(&profile, nl, period);
    let mut p = match profile {
        Profile::Cnoidal { p, .. } | Profile::Dnoidal { p, .. } => p,
        _ => unreachable!(),
    };
    if !(residual <= WAVE_TOLERANCE) {
        return Err(Error::NoAdmissibleParameters {
            reason: "residual oracle rejected the matched parameters".into(),
            residual,
        });
    }
    p.residual = residual;
    Ok(p)
}

/// Splits bounded data as `Φ = Ψ₀ + u₀` with `Ψ̂₀ = e^{-ξ²}Φ̂` (convolution
/// with the heat kernel at time 1).
///
/// The kernel is positive with unit mass, so `Ψ₀` is clamped to the range
/// of `Φ` to remove rounding excursions. `u₀ = Φ - Ψ₀` pointwise, after
/// which `Ψ₀` is nudged by at most a few ulps so that `Ψ₀ + u₀` reproduces
/// `Φ` exactly in floating point wherever that is possible.
pub fn zhidkov_split(phi: &PhysicalField) -> (PhysicalField, PhysicalField) {
    let grid = *phi.grid();
    let (lo, hi) = phi.min_max();
    let smooth = phi.transform().multiplied_real(|xi| (-xi * xi).exp()).inverse();
    let mut psi0 = smooth.into_values();
    let mut u0 = Vec::with_capacity(psi0.len());
    for (p, &a) in psi0.iter_mut().zip(phi.values()) {
        let clamped = p.clamp(lo, hi);
        let u = a - clamped;
        *p = exact_partner(a, u, (a - u).clamp(lo, hi), lo, hi);
        u0.push(u);
    }
    (
        PhysicalField::new(grid, psi0).expect("finite split"),
        PhysicalField::new(grid, u0).expect("finite split"),
    )
}

/// A float `b ∈ [lo, hi]` within a few ulps of `guess` with `b + u == a`,
/// if any.
fn exact_partner(a: f64, u: f64, guess: f64, lo: f64, hi: f64) -> f64 {
    if guess + u == a {
        return guess;
    }
    let mut up = guess;
    let mut down = guess;
    for _ in 0..4 {
        up = up.next_up();
        down = down.next_down();
        if up <= hi && up + u == a {
            return up;
        }
        if down >= lo && down + u == a {
            return down;
        }
    }
    guess
}
