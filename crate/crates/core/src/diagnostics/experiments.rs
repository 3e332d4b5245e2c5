use rayon::prelude::*;

use super::Verdict;
use crate::background::BackgroundField;
use crate::error::{Error, Result};
use crate::nonlinearity::{padded_range, AnalyticNonlinearity};
use crate::norms::{sobolev_norm, WeightSequence};
use crate::solver::{evolve, SolverConfig};
use crate::spectral::{phi_n, DyadicBand, Grid, PhysicalField, Trajectory};

/// `max|S|` over `times` against the size of its three terms.
pub fn background_exactness(
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    grid: &Grid,
    times: &[f64],
) -> Result<Verdict> {
    let mut max_s = 0.0f64;
    let mut scale = 0.0f64;
    for &t in times {
        bg.check_resolved(t, grid)?;
        for j in bg.sample_jet(t, grid)? {
            let terms = [j.psi_t, j.psi_xxx, nl.derivative(j.psi) * j.psi_x];
            max_s = max_s.max(terms.iter().sum::<f64>().abs());
            scale = scale.max(terms.iter().map(|v| v.abs()).sum());
        }
    }
    Ok(Verdict::new("background-exactness", max_s <= 1e-10 * scale)
        .with("max_S", max_s)
        .with("scale", scale))
}

/// Pointwise-in-time check of `‖u(t)‖² ≤ (‖u₀‖² + tA)e^{Bt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    /// `sup_t ‖w·S‖²`.
    pub a: f64,
    /// `1 + M‖Ψ_x‖_∞`.
    pub b: f64,
    /// Sampled `sup|f''|` on the padded attained range of `u + Ψ`.
    pub m: f64,
    /// `(t, ‖u(t)‖², bound(t))`.
    pub series: Vec<(f64, f64, f64)>,
}

impl GrowthCheck {
    pub fn holds(&self) -> bool {
        self.series.iter().all(|&(_, l, r)| l <= r * (1.0 + 1e-10) + 1e-300)
    }

    /// Largest `‖u‖² / bound`.
    pub fn worst_ratio(&self) -> f64 {
        self.series
            .iter()
            .filter(|s| s.2 > 0.0)
            .map(|&(_, l, r)| l / r)
            .fold(0.0, f64::max)
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new("l2-growth", self.holds())
            .with("A", self.a)
            .with("B", self.b)
            .with("M", self.m)
            .with("worst_ratio", self.worst_ratio())
    }
}

/// Reconstructs the constants of the energy estimate
/// `d/dt‖u‖² ≤ (1 + M‖Ψ_x‖_∞)‖u‖² + ‖S‖²` along `traj` and checks the
/// integrated bound at every frame. `buffer` is the taper width used by the
/// solver for the forcing.
pub fn l2_growth_monitor(
    traj: &Trajectory,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    buffer: f64,
) -> Result<GrowthCheck> {
    let grid = *traj.grid();
    let xs = grid.points();
    let taper = grid.boundary_taper(buffer);
    let mut a = 0.0f64;
    let mut psi_x = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (m, u) in traj.frames().iter().enumerate() {
        let t = traj.time(m);
        if !bg.is_zero() {
            let s = bg.forcing_at(nl, t, &xs)?;
            let tapered: Vec<f64> = s.iter().zip(&taper).map(|(v, w)| v * w).collect();
            a = a.max(PhysicalField::new(grid, tapered)?.l2_norm().powi(2));
        }
        let jets = bg.sample_jet(t, &grid)?;
        for (j, jet) in jets.iter().enumerate() {
            psi_x = psi_x.max(jet.psi_x.abs());
            let v = u.values()[j] + jet.psi;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let (plo, phi) = padded_range(lo, hi);
    let m = nl.gwp_bound(plo, phi).m;
    let b = 1.0 + m * psi_x;
    let u0 = traj.frame(0).l2_norm().powi(2);
    let t0 = traj.t0();
    let series = traj
        .frames()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let t = traj.time(k) - t0;
            (traj.time(k), u.l2_norm().powi(2), (u0 + t * a) * (b * t).exp())
        })
        .collect();
    Ok(GrowthCheck { a, b, m, series })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzRow {
    pub delta: f64,
    /// `sup_t ‖u - v‖_{H^{s-1}} / ‖u₀ - v₀‖_{H^{s-1}}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzTable {
    pub rows: Vec<LipschitzRow>,
}

impl LipschitzTable {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// `(max - min)/min` over the rows.
    pub fn spread(&self) -> f64 {
        let lo = self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        (self.max_ratio() - lo) / lo
    }

    pub fn verdict(&self, bound: f64, spread: f64) -> Verdict {
        Verdict::new("flow-lipschitz", self.max_ratio() <= bound && self.spread() <= spread)
            .with("max_ratio", self.max_ratio())
            .with("spread", self.spread())
    }
}

/// `g(x) = cos(x)e^{-x²/4}` normalized to unit `H^{s-1}` norm.
pub fn default_profile(grid: Grid, s: f64) -> PhysicalField {
    let g = PhysicalField::from_fn(grid, |x| x.cos() * (-0.25 * x * x).exp());
    let n = sobolev_norm(&g, s - 1.0);
    g.scaled(1.0 / n)
}

/// Runs `u₀` and `u₀ + δg` for each `δ` and reports `R(δ)`.
pub fn flow_lipschitz_experiment(
    u0: &PhysicalField,
    bg: &BackgroundField,
    nl: &AnalyticNonlinearity,
    config: &SolverConfig,
    deltas: &[f64],
    s: f64,
    profile: Option<&PhysicalField>,
) -> Result<LipschitzTable> {
    if !(s > 0.5) {
        return Err(Error::invalid(format!("regularity s = {s} must exceed 1/2")));
    }
    if deltas.is_empty() || deltas.iter().any(|&d| d == 0.0 || !d.is_finite()) {
        return Err(Error::invalid("perturbation sizes must be finite and nonzero"));
    }
    let g = match profile {
        Some(p) => {
            u0.grid().same_as(p.grid())?;
            p.clone()
        }
        None => default_profile(*u0.grid(), s),
    };
    let mut inputs = vec![u0.clone()];
    for &d in deltas {
        inputs.push(u0.add(&g.scaled(d))?);
    }
    let runs: Vec<Trajectory> = inputs
        .par_iter()
        .map(|v0| evolve(v0, bg, nl, config))
        .collect::<Result<_>>()?;
    let base = &runs[0];
    let rows = deltas
        .iter()
        .zip(&runs[1..])
        .map(|(&delta, run)| {
            let diff = run.sub(base)?;
            let initial = sobolev_norm(diff.frame(0), s - 1.0);
            Ok(LipschitzRow {
                delta,
                ratio: diff.sup_norm(|f| sobolev_norm(f, s - 1.0)) / initial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LipschitzTable { rows })
}

/// `tails[m][i] = Σ_{N > n_stars[i]} ω_N² ⟨N⟩^{2s} ‖P_N u(t_m)‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSeries {
    pub n_stars: Vec<f64>,
    pub times: Vec<f64>,
    pub tails: Vec<Vec<f64>>,
}

impl TailSeries {
    /// `sup_t` of each tail.
    pub fn sup(&self) -> Vec<f64> {
        (0..self.n_stars.len())
            .map(|i| self.tails.iter().map(|r| r[i]).fold(0.0, f64::max))
            .collect()
    }

    /// Whether every sampled time has tails non-increasing in `N*`.
    pub fn monotone(&self) -> bool {
        self.tails.iter().all(|r| r.windows(2).all(|w| w[1] <= w[0]))
    }
}

/// Tails of the enveloped norm above each band level. The weights must
/// increase strictly.
pub fn envelope_tail_monitor(traj: &Trajectory, s: f64, omega: &WeightSequence) -> Result<TailSeries> {
    let band = DyadicBand::for_grid(traj.grid());
    if band != omega.band() {
        return Err(Error::GridMismatch(
            "weight band does not match the trajectory grid".into(),
        ));
    }
    let weights: Vec<(f64, f64)> = omega.iter().collect();
    if weights.windows(2).any(|w| !(w[1].1 > w[0].1)) {
        return Err(Error::invalid("tail monitor needs strictly increasing weights"));
    }
    let n_stars: Vec<f64> = weights.iter().map(|w| w.0).collect();
    let mut tails = Vec::with_capacity(traj.len());
    for u in traj.frames() {
        let spec = u.transform();
        let blocks: Vec<f64> = weights
            .iter()
            .map(|&(n, w)| w * w * (1.0 + n * n).powf(s) * spec.weighted_norm_sq(|xi| phi_n(n, xi).powi(2)))
            .collect();
        let mut row = vec![0.0; blocks.len()];
        let mut acc = 0.0;
        for i in (0..blocks.len()).rev() {
            row[i] = acc;
            acc += blocks[i];
        }
        tails.push(row);
    }
    Ok(TailSeries {
        n_stars,
        times: traj.times(),
        tails,
    })
}
