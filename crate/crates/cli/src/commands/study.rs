use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use gkdv_core::solver::vanishing_viscosity;
use gkdv_core::spectral::fft;
use gkdv_core::{evolve, Grid, PhysicalField, SpectralField};

use super::{prepare_dir, write_text, Reporter};
use crate::config::{ScenarioConfig, StudyKind, StudySection};
use crate::exit::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    /// `dt`, `n` or `μ`.
    pub parameter: f64,
    /// Against the finest level (the `μ = 0` run for viscosity studies).
    pub error: Option<f64>,
    /// Observed order to the next level (temporal), error reduction to the
    /// next level (spatial) or local slope in `μ` (viscosity).
    pub rate: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub kind: StudyKind,
    pub rows: Vec<StudyRow>,
    /// Least-squares order (temporal) or rate (viscosity).
    pub fitted: Option<f64>,
}

impl StudyTable {
    pub const HEADER: &'static str = "level,parameter,error,rate,status";

    pub fn complete(&self) -> bool {
        self.rows.iter().all(|r| r.failure.is_none())
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.17e}")).unwrap_or_default()
}

impl fmt::Display for StudyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::HEADER)?;
        for (i, r) in self.rows.iter().enumerate() {
            let status = r
                .failure
                .as_deref()
                .map_or("ok".to_string(), |m| format!("failed: {}", m.replace(',', ";")));
            writeln!(f, "{i},{},{},{},{status}", r.parameter, cell(r.error), cell(r.rate))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct StudySummary {
    kind: StudyKind,
    complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted: Option<f64>,
    levels: usize,
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn check_ladder(s: &StudySection) -> Result<(), CliError> {
    let l = &s.ladder;
    if l.len() < 2 || l.iter().any(|v| !v.is_finite()) {
        return Err(CliError::config("study ladder needs at least two finite levels"));
    }
    let ok = match s.kind {
        StudyKind::Temporal => l.iter().all(|&v| v > 0.0) && l.windows(2).all(|w| w[1] < w[0]),
        StudyKind::Spatial => {
            l.iter()
                .all(|&v| v >= 4.0 && v.fract() == 0.0 && (v as usize).is_multiple_of(2))
                && l.windows(2).all(|w| w[1] > w[0])
        }
        StudyKind::Viscosity => l.windows(2).all(|w| w[1] < w[0]) && *l.last().unwrap() == 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::config(match s.kind {
            StudyKind::Temporal => "temporal ladder must be positive time steps, strictly decreasing",
            StudyKind::Spatial => "spatial ladder must be even grid sizes, strictly increasing",
            StudyKind::Viscosity => "viscosity ladder must decrease strictly and end at 0",
        }))
    }
}

/// Final states of each ladder member, run in parallel.
fn final_states(
    cfg: &ScenarioConfig,
    ladder: &[f64],
    member: impl Fn(&mut ScenarioConfig, f64) -> Grid + Sync,
) -> Vec<Result<PhysicalField, CliError>> {
    ladder
        .par_iter()
        .map(|&p| {
            let mut c = cfg.clone();
            let grid = member(&mut c, p);
            let sc = c.build_on(grid)?;
            let traj = evolve(&sc.u0, &sc.bg, &sc.nl, sc.solver())?;
            Ok(traj.last().expect("nonempty").clone())
        })
        .collect()
}

fn l2_distance_on(fine: &Grid, a: &PhysicalField, b: &PhysicalField) -> f64 {
    let lift = |f: &PhysicalField| {
        SpectralField::new(*fine, fft::resample(f.transform().coeffs(), fine.n())).expect("lifted field")
    };
    lift(a).sub(&lift(b)).expect("same grid").l2_norm_sq().sqrt()
}

fn ladder_table(kind: StudyKind, ladder: &[f64], states: Vec<Result<PhysicalField, CliError>>) -> StudyTable {
    let finest = states.last().and_then(|r| r.as_ref().ok()).cloned();
    let mut rows: Vec<StudyRow> = ladder
        .iter()
        .zip(&states)
        .map(|(&p, r)| StudyRow {
            parameter: p,
            error: match (r, &finest) {
                (Ok(u), Some(f)) => Some(l2_distance_on(f.grid(), u, f)),
                _ => None,
            },
            rate: None,
            failure: r.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    let last = rows.len() - 1;
    rows[last].error = None;
    for i in 0..last.saturating_sub(1) {
        if let (Some(a), Some(b)) = (rows[i].error, rows[i + 1].error) {
            rows[i].rate = Some(match kind {
                StudyKind::Spatial => a / b,
                _ => (a / b).ln() / (rows[i].parameter / rows[i + 1].parameter).ln(),
            });
        }
    }
    let fitted = match kind {
        StudyKind::Temporal => {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.error.filter(|&e| e > 0.0).map(|e| (r.parameter.ln(), e.ln())))
                .collect();
            slope(&pts)
        }
        _ => None,
    };
    StudyTable { kind, rows, fitted }
}

/// Runs the ladder from the scenario's `[study]` section.
pub fn study(config: &ScenarioConfig, dir: &Path, out: Reporter) -> Result<StudyTable, CliError> {
    let section = config
        .study
        .clone()
        .ok_or_else(|| CliError::config("scenario has no [study] section"))?;
    check_ladder(&section)?;
    config.build()?;
    let ladder = &section.ladder;
    let table = match section.kind {
        StudyKind::Temporal => {
            // Only the endpoints are stored, so each member takes ceil(T/dt)
            // steps of T/steps instead of snapping to the save lattice.
            let t = config.solver.t_final;
            let steps: Vec<usize> = ladder
                .iter()
                .map(|&dt| (((t / dt) * (1.0 - 1e-12)).ceil() as usize).max(1))
                .collect();
            if steps.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::config(format!(
                    "temporal ladder {ladder:?} maps to step counts {steps:?} over t_final = {t}; they must strictly increase"
                )));
            }
            let effective: Vec<f64> = steps.iter().map(|&k| t / k as f64).collect();
            let states = final_states(config, &effective, |c, dt| {
                c.solver.dt = dt;
                c.solver.save_every = ((t / dt).round() as usize).max(1);
                Grid::new(c.grid.half_length, c.grid.n).expect("validated grid")
            });
            ladder_table(section.kind, &effective, states)
        }
        StudyKind::Spatial => {
            let states = final_states(config, ladder, |c, n| {
                c.grid.n = n as usize;
                Grid::new(c.grid.half_length, n as usize).expect("validated grid")
            });
            ladder_table(section.kind, ladder, states)
        }
        StudyKind::Viscosity => {
            let sc = config.build()?;
            match vanishing_viscosity(&sc.u0, &sc.bg, &sc.nl, sc.solver(), ladder, config.diagnostics.s) {
                Ok(t) => {
                    let mut rows: Vec<StudyRow> = t
                        .rows
                        .iter()
                        .map(|r| StudyRow {
                            parameter: r.mu,
                            error: (r.mu > 0.0).then_some(r.difference),
                            rate: None,
                            failure: None,
                        })
                        .collect();
                    for i in 0..rows.len().saturating_sub(2) {
                        if let (Some(a), Some(b)) = (rows[i].error, rows[i + 1].error) {
                            rows[i].rate = Some((a / b).ln() / (rows[i].parameter / rows[i + 1].parameter).ln());
                        }
                    }
                    StudyTable {
                        kind: section.kind,
                        rows,
                        fitted: t.rate,
                    }
                }
                Err(e) => {
                    let msg = e.to_string();
                    StudyTable {
                        kind: section.kind,
                        rows: ladder
                            .iter()
                            .map(|&mu| StudyRow {
                                parameter: mu,
                                error: None,
                                rate: None,
                                failure: Some(msg.clone()),
                            })
                            .collect(),
                        fitted: None,
                    }
                }
            }
        }
    };
    prepare_dir(dir)?;
    write_text(&dir.join("study.csv"), &table.to_string())?;
    let summary = StudySummary {
        kind: table.kind,
        complete: table.complete(),
        fitted: table.fitted,
        levels: table.rows.len(),
    };
    write_text(
        &dir.join("study.toml"),
        &toml::to_string(&summary).expect("summary serializes"),
    )?;
    for line in table.to_string().lines() {
        out.line(line);
    }
    if let Some(p) = table.fitted {
        out.line(format!("fitted = {p:.4}"));
    }
    if let Some(msg) = table.rows.iter().find_map(|r| r.failure.clone()) {
        return Err(CliError::Numerical(format!("study incomplete: {msg}")));
    }
    Ok(table)
}
