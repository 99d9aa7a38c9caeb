//! Scene files, the built-in catalog, per-point analysis and report output
//! for the `chenwarp` command.

pub mod analyze;
pub mod catalog;
pub mod identities;
pub mod report;
pub mod scan;
pub mod scene;

use thiserror::Error;

use chenwarp_core::immersion::ImmersionError;

pub use analyze::{run_analyze, Report, RunOptions, Tolerances};
pub use scan::run_scan;
pub use scene::{Check, Scene};

/// Input and I/O failures. All of them map to exit status 1; failed
/// mathematical checks are reported inside a report with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scene parse error: {0}")]
    SceneParse(String),
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalogEntry(String),
    #[error("ValidationError: {0}")]
    Chart(#[from] ImmersionError),
    #[error("at u = {at:?}: {message}")]
    Point { at: Vec<f64>, message: String },
    #[error("bad tolerance: {0}")]
    Tolerance(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn status(&self) -> i32 {
        1
    }
}
