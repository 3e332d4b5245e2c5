mod catalog;
mod norms;
mod run;
mod split;
mod study;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub use catalog::catalog;
pub use norms::{norms, NormsConfig};
pub use run::{run, RunOutcome};
pub use split::{split, SplitConfig};
pub use study::{study, StudyRow, StudyTable};

use crate::exit::CliError;

/// Printing switch shared by the subcommands.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reporter {
    pub quiet: bool,
}

impl Reporter {
    pub fn line(&self, text: impl AsRef<str>) {
        if !self.quiet {
            // a closed pipe (`gkdv catalog | head`) is not an error
            let _ = writeln!(io::stdout().lock(), "{}", text.as_ref());
        }
    }
}

pub(crate) fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub(crate) fn load_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Relative paths inside a config file are taken from the file's directory.
pub(crate) fn relative_to(config: &Path, p: &Path) -> PathBuf {
    match config.parent() {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}
