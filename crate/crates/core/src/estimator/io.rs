use std::fmt::Write as _;
use std::io::Write;

use super::estimate::EstimateResult;
use crate::error::Result;

/// One row of a convergence trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub shots: u64,
    pub mean: f64,
    pub stderr: f64,
    pub true_error: f64,
}

impl TraceRow {
    pub fn new(result: &EstimateResult, exact: f64) -> Self {
        TraceRow {
            shots: result.shots,
            mean: result.mean,
            stderr: result.stderr,
            true_error: (result.mean - exact).abs(),
        }
    }
}

pub const TRACE_HEADER: &str = "shots,mean,stderr,true_error";

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:e}", r.shots, r.mean, r.stderr, r.true_error).expect("string write");
    }
    out
}

/// Appends rows (without header) to an open trace.
pub fn append_trace<W: Write>(w: &mut W, rows: &[TraceRow]) -> Result<()> {
    for r in rows {
        writeln!(w, "{},{:e},{:e},{:e}", r.shots, r.mean, r.stderr, r.true_error)?;
    }
    Ok(())
}

pub fn estimate_json(result: &EstimateResult) -> String {
    serde_json::to_string_pretty(result).expect("plain data serialises")
}
