//! Library behind the `driftlab` command-line tool. Each subcommand is a
//! function returning a report that can be rendered as text and JSON.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

pub mod bounds;
pub mod drift_report;
pub mod graph_run;
pub mod ordering;
pub mod sweep;
pub mod verify;

pub use bounds::{cmd_bounds, BoundsReport};
pub use drift_report::{cmd_drift_report, cmd_graph_drift_report, DriftMode, DriftReport, DriftReportSpec};
pub use graph_run::{cmd_graph_run, GraphProblem, GraphRunReport, GraphRunSpec};
pub use ordering::{cmd_ordering_test, OrderingReport};
pub use sweep::{cmd_sweep, ExperimentSpec, Preset, SweepOutput};
pub use verify::{cmd_verify, SuiteReport, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] driftlab::Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit codes.
pub mod exit {
    pub const PASSED: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const ERROR: i32 = 2;
}

/// What every subcommand produces.
pub trait Report {
    fn passed(&self) -> bool;
    fn render(&self) -> String;
    fn to_json(&self) -> Value;
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// Serializes `rows` as CSV with a header line.
pub fn csv_bytes<T: serde::Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io {
        path: PathBuf::from("<csv buffer>"),
        source: e.into_error(),
    })
}

pub(crate) fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// JSON number, with non-finite values as `null`.
pub(crate) fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
