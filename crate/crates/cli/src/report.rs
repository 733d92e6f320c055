//! Run reports, artifact writing and exit codes.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::{Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<toridyn::Error> for CliError {
    fn from(e: toridyn::Error) -> Self {
        use toridyn::Error as E;
        match e {
            E::UnknownMap(_)
            | E::MapSpec { .. }
            | E::ParamCount { .. }
            | E::InvalidParameter(_)
            | E::NotHomotopicToIdentity(_)
            | E::MissingInverse(_)
            | E::Empty(_)
            | E::InvalidPolyline(_)
            | E::Bitmap(_) => CliError::Config(e.to_string()),
            E::PointOnPath { .. }
            | E::NonIntegerWinding(_)
            | E::NotPeriodic { .. }
            | E::NotFixed(_)
            | E::PointInsideRegion
            | E::EssentialRegion
            | E::DisconnectedRegion(_)
            | E::NoPathInRegion => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport<'a> {
    pub toolkit_version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub results: serde_json::Value,
    pub artifacts: Vec<String>,
    /// Set when the run completed but found nothing (e.g. no roots).
    pub empty_result: bool,
    pub wall_time_s: f64,
}

/// What a command produced, before the report is assembled.
pub struct Outcome {
    pub results: serde_json::Value,
    pub empty_result: bool,
    /// Failure to report after the artifacts are written.
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn ok(results: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome { results: to_value(results)?, empty_result: false, failure: None })
    }
}

pub fn to_value(v: impl Serialize) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numeric(format!("result is not representable as JSON: {e}")))
}

/// Writes artifacts under the output directory and remembers their names.
pub struct Artifacts {
    dir: PathBuf,
    prefix: String,
    pub written: Vec<String>,
}

impl Artifacts {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir, prefix: cfg.prefix.clone().unwrap_or_default(), written: Vec::new() })
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.prefix))
    }

    pub fn write(&mut self, suffix: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.path(suffix);
        write_file(&path, bytes.as_ref())?;
        self.written.push(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        Ok(path)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_report(
    cmd: Command,
    cfg: &RunConfig,
    outcome: &Outcome,
    artifacts: &mut Artifacts,
    wall_time_s: f64,
) -> Result<PathBuf, CliError> {
    let mut names = artifacts.written.clone();
    let report_name = artifacts.path(".json");
    names.push(report_name.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
    let report = AnalysisReport {
        toolkit_version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        config: cfg,
        results: outcome.results.clone(),
        artifacts: names,
        empty_result: outcome.empty_result,
        wall_time_s,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numeric(e.to_string()))?;
    text.push('\n');
    artifacts.write(".json", text)
}
