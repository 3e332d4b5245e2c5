//! TOML scenario files.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use gkdv_core::io::read_field;
use gkdv_core::norms::WeightSpec;
use gkdv_core::spectral::DyadicBand;
use gkdv_core::{
    AnalyticNonlinearity, BackgroundField, BackgroundSpec, Grid, NonlinearitySpec, PhysicalField, SolverConfig,
    WeightSequence,
};

use crate::exit::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_length: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[derive(Default)]
pub enum InitialData {
    #[default]
    Zero,
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `(3c/2) sech²(√c (x - center)/2)`, the soliton of `f = x²`.
    Soliton {
        c: f64,
        #[serde(default)]
        center: f64,
    },
    /// Random trigonometric polynomial under a Gaussian envelope, drawn from
    /// the scenario seed.
    RandomBump {
        amplitude: f64,
        width: f64,
        modes: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Regularity of the reported `H^s` norms.
    #[serde(default = "one")]
    pub s: f64,
    /// Evaluate diagnostics on every `every`-th stored frame.
    #[serde(default = "one_usize")]
    pub every: usize,
    #[serde(default)]
    pub weights: WeightSpec,
    /// Perturbation sizes for the flow-Lipschitz experiment; empty skips it.
    #[serde(default)]
    pub lipschitz: Vec<f64>,
    #[serde(default = "ten")]
    pub lipschitz_bound: f64,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn ten() -> f64 {
    10.0
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            s: 1.0,
            every: 1,
            weights: WeightSpec::Unit,
            lipschitz: Vec::new(),
            lipschitz_bound: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Ladder of time steps.
    Temporal,
    /// Ladder of grid sizes.
    Spatial,
    /// Ladder of viscosities ending at 0.
    Viscosity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub kind: StudyKind,
    pub ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub nonlinearity: NonlinearitySpec,
    #[serde(default = "zero_background")]
    pub background: BackgroundSpec,
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudySection>,
}

fn zero_background() -> BackgroundSpec {
    BackgroundSpec::Zero
}

/// A validated scenario with its components built.
pub struct Scenario {
    pub config: ScenarioConfig,
    pub name: String,
    pub grid: Grid,
    pub nl: AnalyticNonlinearity,
    pub bg: BackgroundField,
    pub u0: PhysicalField,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("scenario serializes")
    }

    /// Makes file references relative to the directory of the config file.
    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let BackgroundSpec::Tabulated { path } = &mut self.background {
            fix(path);
        }
        if let InitialData::File { path } = &mut self.initial {
            fix(path);
        }
    }

    pub fn weights(&self, grid: &Grid) -> Result<WeightSequence, CliError> {
        Ok(WeightSequence::from_spec(
            DyadicBand::for_grid(grid),
            self.diagnostics.weights,
        )?)
    }

    pub fn build(&self) -> Result<Scenario, CliError> {
        let grid = Grid::new(self.grid.half_length, self.grid.n)?;
        self.build_on(grid)
    }

    /// Builds the scenario on a grid other than the configured one.
    pub fn build_on(&self, grid: Grid) -> Result<Scenario, CliError> {
        self.solver.validate()?;
        if self.diagnostics.every == 0 {
            return Err(CliError::config("diagnostics.every must be at least 1"));
        }
        let nl = AnalyticNonlinearity::from_spec(&self.nonlinearity)?;
        let bg = BackgroundField::new(self.background.clone(), &nl)?;
        let u0 = self.initial_data(grid)?;
        Ok(Scenario {
            config: self.clone(),
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            grid,
            nl,
            bg,
            u0,
        })
    }

    fn initial_data(&self, grid: Grid) -> Result<PhysicalField, CliError> {
        Ok(match &self.initial {
            InitialData::Zero => PhysicalField::zeros(grid),
            &InitialData::Gaussian {
                amplitude,
                width,
                center,
            } => {
                if !(width > 0.0) {
                    return Err(CliError::config("gaussian width must be positive"));
                }
                PhysicalField::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
            }
            &InitialData::Soliton { c, center } => {
                if !(c > 0.0) {
                    return Err(CliError::config("soliton speed must be positive"));
                }
                PhysicalField::from_fn(grid, |x| 1.5 * c / (0.5 * c.sqrt() * (x - center)).cosh().powi(2))
            }
            &InitialData::RandomBump {
                amplitude,
                width,
                modes,
            } => {
                if !(width > 0.0) {
                    return Err(CliError::config("random-bump width must be positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let terms: Vec<(f64, f64)> = (1..=modes)
                    .map(|k| {
                        (
                            rng.random_range(-1.0..1.0) / (k * k) as f64,
                            rng.random_range(0.0..2.0 * PI),
                        )
                    })
                    .collect();
                PhysicalField::from_fn(grid, |x| {
                    let wave: f64 = terms
                        .iter()
                        .enumerate()
                        .map(|(k, &(a, p))| a * ((k + 1) as f64 * x + p).cos())
                        .sum();
                    amplitude * wave * (-(x / width).powi(2)).exp()
                })
            }
            InitialData::File { path } => {
                let f = read_field(path)?;
                grid.same_as(f.grid())?;
                f
            }
        })
    }
}

impl Scenario {
    /// Whether the background is one of the exact traveling waves.
    pub fn exact_background(&self) -> bool {
        matches!(
            self.config.background,
            BackgroundSpec::MkdvKink { .. }
                | BackgroundSpec::GardnerKink { .. }
                | BackgroundSpec::KdvCnoidal { .. }
                | BackgroundSpec::MkdvDnoidal { .. }
        )
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.config.solver
    }
}
