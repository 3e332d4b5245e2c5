use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gkdv_core::io::read_trajectory;
use gkdv_core::norms::{bourgain_norm, enveloped_norm, extend_rho_t, sobolev_norm, NormRow, WeightSpec};
use gkdv_core::spectral::DyadicBand;
use gkdv_core::{Trajectory, WeightSequence};

use super::{load_toml, prepare_dir, relative_to, write_text, Reporter};
use crate::exit::CliError;

/// `gkdv norms` input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    pub trajectory: PathBuf,
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    /// Modulation exponents for the Bourgain norm; empty skips it.
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub weights: WeightSpec,
    /// Cut the trajectory with `ρ_T` (`T` = its span) before the space-time
    /// norms.
    #[serde(default)]
    pub extend: bool,
}

fn default_s() -> Vec<f64> {
    vec![1.0]
}

fn l2t_hs(traj: &Trajectory, s: f64) -> f64 {
    let sum: f64 = traj.frames().iter().map(|f| sobolev_norm(f, s).powi(2)).sum();
    (traj.dt() * sum).sqrt()
}

pub fn norm_rows(cfg: &NormsConfig, traj: &Trajectory) -> Result<Vec<NormRow>, CliError> {
    let grid = *traj.grid();
    let grid_id = format!("L={};n={}", grid.half_length(), grid.n());
    let omega = WeightSequence::from_spec(DyadicBand::for_grid(&grid), cfg.weights)?;
    let spacetime = if cfg.extend {
        extend_rho_t(traj, traj.span())?
    } else {
        traj.clone()
    };
    let window = if cfg.extend { "rho_T" } else { "raw" };
    let row = |name: &str, s: f64, b: Option<f64>, value: f64, window: &str| NormRow {
        name: name.into(),
        s,
        b,
        value,
        grid_id: grid_id.clone(),
        window: window.into(),
    };
    let mut rows = Vec::new();
    for &s in &cfg.s {
        rows.push(row("sobolev", s, None, traj.sup_norm(|f| sobolev_norm(f, s)), "sup_t"));
        let env = traj
            .frames()
            .iter()
            .map(|f| enveloped_norm(f, s, &omega))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rows.push(row("enveloped", s, None, env, "sup_t"));
        rows.push(row("l2t_hs", s, None, l2t_hs(&spacetime, s), window));
        for &b in &cfg.b {
            rows.push(row("bourgain", s, Some(b), bourgain_norm(&spacetime, s, b)?, window));
        }
    }
    Ok(rows)
}

/// Evaluates the configured norms of a stored trajectory into `norms.csv`.
pub fn norms(config_path: &Path, dir: &Path, out: Reporter) -> Result<Vec<NormRow>, CliError> {
    let mut cfg: NormsConfig = load_toml(config_path)?;
    cfg.trajectory = relative_to(config_path, &cfg.trajectory);
    let traj = read_trajectory(&cfg.trajectory)?;
    let rows = norm_rows(&cfg, &traj)?;
    let mut csv = String::from(NormRow::HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_string());
        csv.push('\n');
    }
    prepare_dir(dir)?;
    write_text(&dir.join("norms.csv"), &csv)?;
    for line in csv.lines() {
        out.line(line);
    }
    Ok(rows)
}
