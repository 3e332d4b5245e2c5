//! Field and trajectory files: raw little-endian `f64` samples in a `.bin`
//! file next to a `.toml` sidecar describing the grid and the run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, PhysicalField, Trajectory};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Field,
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub kind: FileKind,
    pub format_version: u32,
    pub crate_version: String,
    pub half_length: f64,
    pub n: usize,
    #[serde(default)]
    pub frames: usize,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub dt: f64,
    /// Echo of the configuration that produced the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<toml::Table>,
}

impl Sidecar {
    fn new(kind: FileKind, grid: &Grid) -> Self {
        Self {
            kind,
            format_version: FORMAT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            half_length: grid.half_length(),
            n: grid.n(),
            frames: 1,
            t0: 0.0,
            dt: 0.0,
            config: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.n).map_err(|e| Error::Malformed(format!("sidecar grid: {e}")))
    }
}

/// `data.bin -> data.toml`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("toml")
}

fn encode(values: impl Iterator<Item = f64>) -> Vec<u8> {
    values.flat_map(f64::to_le_bytes).collect()
}

fn decode(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Malformed(format!(
            "{} bytes is not a whole number of f64 samples",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

fn write_pair(path: &Path, bytes: &[u8], sidecar: &Sidecar) -> Result<()> {
    fs::write(path, bytes)?;
    let text = toml::to_string(sidecar).map_err(|e| Error::Malformed(e.to_string()))?;
    fs::write(sidecar_path(path), text)?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(sidecar_path(path))?;
    let car: Sidecar = toml::from_str(&text).map_err(|e| Error::Malformed(format!("sidecar: {e}")))?;
    if car.format_version != FORMAT_VERSION {
        return Err(Error::Malformed(format!(
            "unsupported format version {}",
            car.format_version
        )));
    }
    Ok(car)
}

pub fn write_field(path: &Path, field: &PhysicalField, config: Option<toml::Table>) -> Result<()> {
    let mut car = Sidecar::new(FileKind::Field, field.grid());
    car.config = config;
    write_pair(path, &encode(field.values().iter().copied()), &car)
}

pub fn read_field(path: &Path) -> Result<PhysicalField> {
    let car = read_sidecar(path)?;
    if car.kind != FileKind::Field {
        return Err(Error::Malformed(format!(
            "{} holds a trajectory, not a field",
            path.display()
        )));
    }
    let values = decode(&fs::read(path)?)?;
    if values.len() != car.n {
        return Err(Error::Malformed(format!(
            "expected {} samples, found {}",
            car.n,
            values.len()
        )));
    }
    PhysicalField::new(car.grid()?, values).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, config: Option<toml::Table>) -> Result<()> {
    let mut car = Sidecar::new(FileKind::Trajectory, traj.grid());
    car.frames = traj.len();
    car.t0 = traj.t0();
    car.dt = traj.dt();
    car.config = config;
    let bytes = encode(traj.frames().iter().flat_map(|f| f.values().iter().copied()));
    write_pair(path, &bytes, &car)
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let car = read_sidecar(path)?;
    let grid = car.grid()?;
    let values = decode(&fs::read(path)?)?;
    let frames = match car.kind {
        FileKind::Field => 1,
        FileKind::Trajectory => car.frames,
    };
    if frames == 0 || values.len() != frames * car.n {
        return Err(Error::Malformed(format!(
            "expected {frames} frames of {} samples, found {} samples",
            car.n,
            values.len()
        )));
    }
    let fields = values
        .chunks_exact(car.n)
        .map(|c| PhysicalField::new(grid, c.to_vec()))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Malformed(e.to_string()))?;
    let dt = if car.dt > 0.0 { car.dt } else { 1.0 };
    Trajectory::new(grid, car.t0, dt, fields).map_err(|e| Error::Malformed(e.to_string()))
}
