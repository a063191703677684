//! Scenario-driven front end for the `tomflow` solvers.

pub mod run;
pub mod scenario;

use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

pub use run::{run, Artifacts};
pub use scenario::{parse_scenario, parse_scenario_str, Kind, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("solver error: {0}")]
    Solver(#[from] tomflow::TomError),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation { .. } => 3,
            CliError::Solver(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    /// One-line `key=value` rendering for stderr.
    pub fn structured(&self) -> String {
        let kind = match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Solver(_) => "solver",
            CliError::Io { .. } => "io",
        };
        format!("error kind={kind} code={} message=\"{}\"", self.exit_code(), self)
    }
}

pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Writes every artifact, then `meta.txt`.
pub fn write_artifacts(dir: &Path, art: &Artifacts, config_text: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, body) in &art.files {
        write_atomic(&dir.join(name), body)?;
    }
    let mut meta = format!(
        "version = {}\nkind = {}\nconfig_sha256 = {}\n",
        env!("CARGO_PKG_VERSION"),
        art.kind.name(),
        config_hash(config_text)
    );
    for (k, v) in &art.meta {
        meta.push_str(&format!("{k} = {v}\n"));
    }
    write_atomic(&dir.join("meta.txt"), &meta)
}
