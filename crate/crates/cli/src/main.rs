use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use gkdv_cli::commands::{self, Reporter};
use gkdv_cli::{CliError, ExitCode, ScenarioConfig};

const DEFAULT_OUTPUT: &str = "gkdv-out";

#[derive(Parser)]
#[command(name = "gkdv", version, about = "Generalized KdV on non-decaying backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario or job file; repeat to run a batch.
    #[arg(long = "config", global = true, value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Worker threads for batches and ladders (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Output root; each config writes into `<root>/<name>`.
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Only errors are printed.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve a scenario and evaluate its diagnostics and verdicts.
    Run,
    /// Run the convergence ladder in the scenario's [study] section.
    Study,
    /// Evaluate norms of a stored trajectory.
    Norms,
    /// Split a bounded field into a smooth background and an H^s part.
    Split,
    /// List the available backgrounds and nonlinearities.
    Catalog,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "job".into(), |s| s.to_string_lossy().into_owned())
}

fn run_one(cli: &Cli, path: &Path, out: Reporter) -> Result<(), CliError> {
    let root_flag = cli.output.clone();
    match cli.command {
        Command::Run | Command::Study => {
            let cfg = ScenarioConfig::load(path)?;
            let root = root_flag
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| DEFAULT_OUTPUT.into());
            let dir = root.join(cfg.name.clone().unwrap_or_else(|| stem(path)));
            if matches!(cli.command, Command::Run) {
                commands::run(&cfg, &dir, out).map(|_| ())
            } else {
                commands::study(&cfg, &dir, out).map(|_| ())
            }
        }
        Command::Norms => {
            let dir = root_flag.unwrap_or_else(|| DEFAULT_OUTPUT.into()).join(stem(path));
            commands::norms(path, &dir, out).map(|_| ())
        }
        Command::Split => {
            let dir = root_flag.unwrap_or_else(|| DEFAULT_OUTPUT.into()).join(stem(path));
            commands::split(path, &dir, out).map(|_| ())
        }
        Command::Catalog => {
            commands::catalog(out);
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let out = Reporter { quiet: cli.quiet };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            process::exit(ExitCode::Config.code());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    if matches!(cli.command, Command::Catalog) {
        commands::catalog(out);
        process::exit(ExitCode::Ok.code());
    }
    if cli.configs.is_empty() {
        eprintln!("error: --config PATH is required");
        process::exit(ExitCode::Config.code());
    }
    let mut seen = HashSet::new();
    if cli.configs.iter().any(|p| !seen.insert(stem(p))) {
        eprintln!("error: config file names must be distinct within a batch");
        process::exit(ExitCode::Config.code());
    }
    let codes: Vec<ExitCode> = cli
        .configs
        .par_iter()
        .map(|path| match run_one(&cli, path, out) {
            Ok(()) => ExitCode::Ok,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                e.exit_code()
            }
        })
        .collect();
    let worst = codes.into_iter().max().unwrap_or(ExitCode::Ok);
    process::exit(worst.code());
}
