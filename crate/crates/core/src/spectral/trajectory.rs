use super::field::PhysicalField;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Fields sampled at `t_m = t0 + m·dt` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    t0: f64,
    dt: f64,
    frames: Vec<PhysicalField>,
}

impl Trajectory {
    pub fn new(grid: Grid, t0: f64, dt: f64, frames: Vec<PhysicalField>) -> Result<Self> {
        if !(dt > 0.0) || !t0.is_finite() {
            return Err(Error::invalid(format!("bad time lattice t0={t0}, dt={dt}")));
        }
        for f in &frames {
            grid.same_as(f.grid())?;
        }
        Ok(Self { grid, t0, dt, frames })
    }

    /// A trajectory with no frames yet.
    pub fn empty(grid: Grid, t0: f64, dt: f64) -> Self {
        Self {
            grid,
            t0,
            dt,
            frames: Vec::new(),
        }
    }

    /// Samples `f(t, x)` on the lattice.
    pub fn from_fn(grid: Grid, t0: f64, dt: f64, count: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let frames = (0..count)
            .map(|m| {
                let t = t0 + m as f64 * dt;
                PhysicalField::from_fn(grid, |x| f(t, x))
            })
            .collect();
        Self { grid, t0, dt, frames }
    }

    pub fn push(&mut self, field: PhysicalField) -> Result<()> {
        self.grid.same_as(field.grid())?;
        self.frames.push(field);
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|m| self.time(m)).collect()
    }

    pub fn frames(&self) -> &[PhysicalField] {
        &self.frames
    }

    pub fn frame(&self, m: usize) -> &PhysicalField {
        &self.frames[m]
    }

    pub fn last(&self) -> Option<&PhysicalField> {
        self.frames.last()
    }

    pub fn into_frames(self) -> Vec<PhysicalField> {
        self.frames
    }

    /// Time span covered by the samples, `(count-1)·dt`.
    pub fn span(&self) -> f64 {
        self.len().saturating_sub(1) as f64 * self.dt
    }

    /// `sup_m ‖u(t_m)‖` for a caller-supplied spatial norm.
    pub fn sup_norm(&self, norm: impl Fn(&PhysicalField) -> f64) -> f64 {
        self.frames.iter().map(norm).fold(0.0, f64::max)
    }

    /// Frame-wise difference of two trajectories on the same lattice.
    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        self.grid.same_as(&other.grid)?;
        if self.len() != other.len()
            || (self.dt - other.dt).abs() > 1e-12 * self.dt
            || (self.t0 - other.t0).abs() > 1e-12 * self.dt.max(1.0)
        {
            return Err(Error::GridMismatch("time lattices differ".into()));
        }
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            grid: self.grid,
            t0: self.t0,
            dt: self.dt,
            frames,
        })
    }

    /// Every `stride`-th frame.
    pub fn thinned(&self, stride: usize) -> Trajectory {
        let stride = stride.max(1);
        Trajectory {
            grid: self.grid,
            t0: self.t0,
            dt: self.dt * stride as f64,
            frames: self.frames.iter().step_by(stride).cloned().collect(),
        }
    }
}
