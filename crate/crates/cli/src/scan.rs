//! Grid scans written as CSV.
//!
//! Columns: one per chart coordinate (named after it), then the fixed
//! columns of [`FIXED_COLUMNS`]. Values that do not apply to the chart or were
//! not requested are left empty. Rows follow the lexicographic grid order.

use std::io::Write;

use crate::analyze::{Context, PointRecord, RunOptions, Summary};
use crate::report::fmt_f64;
use crate::scene::Scene;
use crate::CliError;

pub const FIXED_COLUMNS: [&str; 15] = [
    "mean_h2",
    "h2",
    "tau",
    "tau_base",
    "tau_fiber",
    "delta",
    "delta_base",
    "delta_fiber",
    "lap_ratio",
    "slack_chen13",
    "slack_chen41i",
    "slack_chen41ii",
    "gauss_residual",
    "eq24_residual",
    "trace_residual",
];

pub struct ScanOutcome {
    pub rows: usize,
    pub status: i32,
    pub summary: Summary,
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn row(rec: &PointRecord) -> Vec<String> {
    let mut out: Vec<String> = rec.u.iter().map(|&x| fmt_f64(x)).collect();
    let slack = |c: &Option<crate::analyze::InequalityCheck>| c.as_ref().map(|c| c.report.slack);
    out.extend(
        [
            Some(rec.mean_h2),
            Some(rec.h2),
            Some(rec.tau),
            Some(rec.tau_base),
            Some(rec.tau_fiber),
            Some(rec.delta),
            rec.delta_base,
            rec.delta_fiber,
            Some(rec.lap_ratio),
            slack(&rec.chen13),
            slack(&rec.chen41i),
            slack(&rec.chen41ii),
            rec.gauss.as_ref().map(|g| g.max_difference),
            rec.eq24.as_ref().map(|e| e.residual),
            Some(rec.trace_residual),
        ]
        .into_iter()
        .map(cell),
    );
    out
}

/// Writes one CSV row per grid point of the scene to `out`.
pub fn run_scan<W: Write>(scene: &Scene, opts: &RunOptions, out: W) -> Result<ScanOutcome, CliError> {
    let ctx = Context::new(scene, opts)?;
    if ctx.prepared.grid.is_empty() {
        return Err(CliError::Scene("scan needs a non-empty grid".into()));
    }
    let records = ctx.analyze_points(&ctx.prepared.grid)?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = ctx
        .prepared
        .chart
        .coords
        .iter()
        .map(String::as_str)
        .chain(FIXED_COLUMNS)
        .collect();
    w.write_record(&header)?;
    for rec in &records {
        w.write_record(row(rec))?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: "csv output".into(),
        source,
    })?;
    let summary = Summary::aggregate(&records);
    Ok(ScanOutcome {
        rows: records.len(),
        status: if summary.failed.is_empty() { 0 } else { 2 },
        summary,
    })
}
