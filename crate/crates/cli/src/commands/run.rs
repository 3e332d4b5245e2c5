use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use gkdv_core::diagnostics::{
    background_exactness, flow_lipschitz_experiment, l2_growth_monitor, DiagnosticsReport, Verdict,
};
use gkdv_core::io::{write_field, write_trajectory};
use gkdv_core::{evolve, Error, Trajectory};

use super::{prepare_dir, write_text, Reporter};
use crate::config::{Scenario, ScenarioConfig};
use crate::exit::{CliError, ExitCode};

/// Bound on `sup_t ‖u‖_{L²}` for zero data on an exact background.
const ZERO_PERSISTENCE: f64 = 1e-8;

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub verdicts: Vec<Verdict>,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    name: &'a str,
    crate_version: &'a str,
    status: &'a str,
    exit_code: i32,
    message: String,
    frames: usize,
    wall_seconds: f64,
    config: toml::Table,
}

fn write_metadata(
    dir: &Path,
    sc: &Scenario,
    code: ExitCode,
    message: String,
    frames: usize,
    start: Instant,
) -> Result<(), CliError> {
    let meta = RunMetadata {
        name: &sc.name,
        crate_version: env!("CARGO_PKG_VERSION"),
        status: if code == ExitCode::Ok { "ok" } else { "failed" },
        exit_code: code.code(),
        message,
        frames,
        wall_seconds: start.elapsed().as_secs_f64(),
        config: sc.config.to_table(),
    };
    write_text(
        &dir.join("run.toml"),
        &toml::to_string(&meta).expect("metadata serializes"),
    )
}

fn verdicts(sc: &Scenario, traj: &Trajectory, report: &DiagnosticsReport) -> Result<Vec<Verdict>, CliError> {
    let cfg = sc.solver();
    let mut out = Vec::new();
    if sc.exact_background() {
        let t = cfg.t_final;
        out.push(background_exactness(&sc.bg, &sc.nl, &sc.grid, &[0.0, 0.5 * t, t])?);
        if sc.u0.max_abs() == 0.0 {
            let sup = traj.sup_norm(|f| f.l2_norm());
            out.push(Verdict::new("zero-persistence", sup <= ZERO_PERSISTENCE).with("sup_l2", sup));
        }
    }
    if sc.bg.is_zero() && cfg.mu == 0.0 {
        out.push(report.conservation_verdict());
    }
    out.push(l2_growth_monitor(traj, &sc.bg, &sc.nl, cfg.buffer)?.verdict());
    let d = &sc.config.diagnostics;
    if !d.lipschitz.is_empty() {
        let table = flow_lipschitz_experiment(&sc.u0, &sc.bg, &sc.nl, cfg, &d.lipschitz, d.s, None)?;
        out.push(table.verdict(d.lipschitz_bound, 0.2));
    }
    Ok(out)
}

/// Evolves one scenario into `dir` and evaluates its verdicts.
pub fn run(config: &ScenarioConfig, dir: &Path, out: Reporter) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let sc = config.build()?;
    prepare_dir(dir)?;
    let echo = Some(sc.config.to_table());
    write_field(&dir.join("initial.bin"), &sc.u0, echo.clone())?;
    out.line(format!("[{}] evolving to t = {}", sc.name, sc.solver().t_final));
    let traj = match evolve(&sc.u0, &sc.bg, &sc.nl, sc.solver()) {
        Ok(t) => t,
        Err(e) => {
            let mut frames = 0;
            if let Error::Aborted { partial, .. } = &e {
                frames = partial.len();
                write_trajectory(&dir.join("partial.bin"), partial, echo)?;
            }
            let err = CliError::from(e);
            write_metadata(dir, &sc, err.exit_code(), err.to_string(), frames, start)?;
            return Err(err);
        }
    };
    write_trajectory(&dir.join("trajectory.bin"), &traj, echo.clone())?;
    write_field(&dir.join("final.bin"), traj.last().expect("nonempty"), echo)?;

    let d = &sc.config.diagnostics;
    let outcome = (|| {
        let omega = sc.config.weights(&sc.grid)?;
        let mut report =
            DiagnosticsReport::compute(&traj.thinned(d.every), &sc.bg, &sc.nl, d.s, &omega, sc.solver().buffer)?;
        for v in verdicts(&sc, &traj, &report)? {
            report.push_verdict(v);
        }
        Ok::<_, CliError>(report)
    })();
    let report = match outcome {
        Ok(r) => r,
        Err(err) => {
            write_metadata(dir, &sc, err.exit_code(), err.to_string(), traj.len(), start)?;
            return Err(err);
        }
    };
    write_text(&dir.join("diagnostics.csv"), &report.to_csv())?;
    write_text(&dir.join("verdicts.toml"), &report.verdicts_toml())?;
    for v in &report.verdicts {
        out.line(format!("[{}] {v}", sc.name));
    }
    let failed: Vec<String> = report
        .verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.name.clone())
        .collect();
    if failed.is_empty() {
        write_metadata(dir, &sc, ExitCode::Ok, String::new(), traj.len(), start)?;
        Ok(RunOutcome {
            dir: dir.to_path_buf(),
            verdicts: report.verdicts,
        })
    } else {
        let err = CliError::Verdict(failed);
        write_metadata(dir, &sc, err.exit_code(), err.to_string(), traj.len(), start)?;
        Err(err)
    }
}
