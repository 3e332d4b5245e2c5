use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gkdv_core::background::zhidkov_split;
use gkdv_core::io::{read_field, write_field};
use gkdv_core::norms::sobolev_norm;

use super::{load_toml, prepare_dir, relative_to, write_text, Reporter};
use crate::exit::CliError;

/// `gkdv split` input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub input: PathBuf,
    #[serde(default = "one")]
    pub s: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSummary {
    pub phi_linf: f64,
    pub psi0_linf: f64,
    pub u0_hs: f64,
    pub s: f64,
}

/// Writes `psi0.bin` and `u0.bin` with `psi0 + u0 = input`.
pub fn split(config_path: &Path, dir: &Path, out: Reporter) -> Result<SplitSummary, CliError> {
    let cfg: SplitConfig = load_toml(config_path)?;
    let phi = read_field(&relative_to(config_path, &cfg.input))?;
    let (psi0, u0) = zhidkov_split(&phi);
    prepare_dir(dir)?;
    write_field(&dir.join("psi0.bin"), &psi0, None)?;
    write_field(&dir.join("u0.bin"), &u0, None)?;
    let summary = SplitSummary {
        phi_linf: phi.max_abs(),
        psi0_linf: psi0.max_abs(),
        u0_hs: sobolev_norm(&u0, cfg.s),
        s: cfg.s,
    };
    write_text(
        &dir.join("split.toml"),
        &toml::to_string(&summary).expect("summary serializes"),
    )?;
    out.line(format!("psi0_linf = {:.6e}", summary.psi0_linf));
    out.line(format!("phi_linf = {:.6e}", summary.phi_linf));
    out.line(format!("u0_hs = {:.6e} (s = {})", summary.u0_hs, summary.s));
    Ok(summary)
}
