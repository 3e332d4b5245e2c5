//! Space-time Fourier analysis of trajectories.
//!
//! A trajectory is transformed in the interaction variable
//! `v(t, ξ) = e^{-itξ³} û(t, ξ)`: the temporal frequency of `v` is the
//! modulation `σ = τ - ξ³`, so weights and projectors that depend on
//! `τ - ξ³` act on `v` directly and the fast phase `ξ³` never has to be
//! resolved in time. The stored window is treated as one period.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::fft::fft_in_place;
use crate::spectral::{eta, psi_l, Grid, PhysicalField, SpectralField, Trajectory};

/// Ends must be below this fraction of the peak frame norm.
pub const END_DECAY: f64 = 1e-10;

/// Temporal DFT of the twisted coefficients, indexed `[spatial bin][k]`.
#[derive(Debug, Clone)]
pub struct SpaceTimeSpectrum {
    grid: Grid,
    t0: f64,
    dt: f64,
    frames: usize,
    data: Vec<Vec<Complex64>>,
}

fn check_ends(traj: &Trajectory) -> Result<()> {
    if traj.len() < 2 {
        return Err(Error::invalid("space-time transform needs at least two frames"));
    }
    let norms: Vec<f64> = traj.frames().iter().map(|f| f.l2_norm()).collect();
    let peak = norms.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let ratio = norms[0].max(*norms.last().unwrap()) / peak;
    if ratio > END_DECAY {
        return Err(Error::NonDecayingEnds { ratio });
    }
    Ok(())
}

impl SpaceTimeSpectrum {
    pub fn new(traj: &Trajectory) -> Result<Self> {
        check_ends(traj)?;
        Ok(Self::periodized(traj))
    }

    fn periodized(traj: &Trajectory) -> Self {
        let grid = *traj.grid();
        let n = grid.n();
        let m = traj.len();
        let xis = grid.wavenumbers();
        let mut data = vec![vec![Complex64::new(0.0, 0.0); m]; n];
        for (j, frame) in traj.frames().iter().enumerate() {
            let t = traj.time(j);
            for (k, c) in frame.transform().coeffs().iter().enumerate() {
                let xi = xis[k];
                data[k][j] = c * Complex64::from_polar(1.0, -t * xi * xi * xi);
            }
        }
        let scale = 1.0 / m as f64;
        for row in &mut data {
            fft_in_place(row, false);
            for c in row.iter_mut() {
                *c *= scale;
            }
        }
        Self {
            grid,
            t0: traj.t0(),
            dt: traj.dt(),
            frames: m,
            data,
        }
    }

    pub fn period(&self) -> f64 {
        self.frames as f64 * self.dt
    }

    /// Modulation `σ_k = 2π k / period` for temporal bin `k` (signed).
    pub fn sigma(&self, k: usize) -> f64 {
        let m = self.frames as i64;
        let signed = if (k as i64) < (m + 1) / 2 {
            k as i64
        } else {
            k as i64 - m
        };
        2.0 * std::f64::consts::PI * signed as f64 / self.period()
    }

    pub fn max_sigma(&self) -> f64 {
        (0..self.frames).map(|k| self.sigma(k).abs()).fold(0.0, f64::max)
    }

    /// `period · 2L · Σ_{ξ,σ} w_x(ξ) w_t(σ) |c|²`.
    pub fn weighted_sum(&self, wx: impl Fn(f64) -> f64, wt: impl Fn(f64) -> f64) -> f64 {
        let sig: Vec<f64> = (0..self.frames).map(|k| wt(self.sigma(k))).collect();
        let total: f64 = self
            .data
            .iter()
            .enumerate()
            .map(|(b, row)| {
                let w = wx(self.grid.wavenumber(b));
                if w == 0.0 {
                    return 0.0;
                }
                w * row.iter().zip(&sig).map(|(c, s)| s * c.norm_sqr()).sum::<f64>()
            })
            .sum();
        total * self.period() * self.grid.length()
    }

    /// Applies the modulation multiplier `m(σ)` and returns to physical space.
    pub fn project(&self, m: impl Fn(f64) -> f64) -> Trajectory {
        let n = self.grid.n();
        let sig: Vec<f64> = (0..self.frames).map(|k| m(self.sigma(k))).collect();
        let mut spatial = vec![vec![Complex64::new(0.0, 0.0); n]; self.frames];
        for (b, row) in self.data.iter().enumerate() {
            let xi = self.grid.wavenumber(b);
            let mut buf: Vec<Complex64> = row.iter().zip(&sig).map(|(c, s)| c * s).collect();
            fft_in_place(&mut buf, true);
            for (j, v) in buf.into_iter().enumerate() {
                let t = self.t0 + j as f64 * self.dt;
                spatial[j][b] = v * Complex64::from_polar(1.0, t * xi * xi * xi);
            }
        }
        let frames = spatial
            .into_iter()
            .map(|c| SpectralField::new(self.grid, c).expect("grid length").inverse())
            .collect();
        Trajectory::new(self.grid, self.t0, self.dt, frames).expect("consistent lattice")
    }
}

/// `‖u‖_{X^{s,b}} = (Σ (1+|τ-ξ³|)^{2b} (1+ξ²)^s |ũ|²)^{1/2}` with the
/// Parseval weights of both transforms.
pub fn bourgain_norm(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    let st = SpaceTimeSpectrum::new(traj)?;
    Ok(st
        .weighted_sum(|xi| (1.0 + xi * xi).powf(s), |sigma| (1.0 + sigma.abs()).powf(2.0 * b))
        .sqrt())
}

/// `Q_L`: multiplier `ψ_L(τ - ξ³)`.
pub fn modulation_project(traj: &Trajectory, l: f64) -> Result<Trajectory> {
    let st = SpaceTimeSpectrum::new(traj)?;
    Ok(st.project(|sigma| psi_l(l, sigma)))
}

/// Extension `ρ_T[u](t) = U(t) η(t) U(-μ_T(t)) u(μ_T(t))`, `μ_T(t) =
/// clamp(t, 0, T)`, sampled on `[-2, 2]` with the input's time step.
///
/// The input must start at `t = 0`, cover `[0, T]`, and `2/dt` and `T/dt`
/// must be integers.
pub fn extend_rho_t(input: &Trajectory, t_cut: f64) -> Result<Trajectory> {
    if !(t_cut > 0.0 && t_cut < 2.0) {
        return Err(Error::invalid(format!("extension time T = {t_cut} outside (0, 2)")));
    }
    let dt = input.dt();
    if input.t0().abs() > 1e-12 {
        return Err(Error::invalid("extension input must start at t = 0"));
    }
    let lattice = |x: f64, what: &str| -> Result<usize> {
        let r = x / dt;
        if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
            return Err(Error::invalid(format!("{what} = {x} is not a multiple of dt = {dt}")));
        }
        Ok(r.round() as usize)
    };
    let half = lattice(2.0, "window half-width")?;
    let cut = lattice(t_cut, "T")?;
    if cut >= input.len() {
        return Err(Error::invalid(format!(
            "input covers [0, {}] but T = {t_cut}",
            input.span()
        )));
    }
    let grid = *input.grid();
    let start = input.frame(0).transform();
    let end = input.frame(cut).transform();
    let mut out = Trajectory::empty(grid, -2.0, dt);
    for m in 0..=2 * half {
        let t = (m as f64 - half as f64) * dt;
        let cutoff = eta(t);
        let frame = if cutoff == 0.0 {
            PhysicalField::zeros(grid)
        } else if m < half {
            airy_scaled(&start, t, cutoff)
        } else if m - half >= cut {
            airy_scaled(&end, t - t_cut, cutoff)
        } else {
            input.frame(m - half).scaled(cutoff)
        };
        out.push(frame)?;
    }
    Ok(out)
}

fn airy_scaled(f: &SpectralField, t: f64, a: f64) -> PhysicalField {
    f.multiplied(|xi| Complex64::from_polar(a, t * xi * xi * xi)).inverse()
}
