//! Append-only run records and their CSV serialization.

use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// One measurement row.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub scenario: String,
    /// Flattened cell parameters as a JSON object (sorted keys).
    pub param_json: String,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    pub wall_time_ms: u64,
}

impl RunRecord {
    pub fn new(
        scenario: &str,
        params: &serde_json::Value,
        metric: &str,
        value: f64,
        seed: u64,
        wall_time_ms: u64,
    ) -> RunRecord {
        RunRecord {
            scenario: scenario.to_string(),
            param_json: params.to_string(),
            metric: metric.to_string(),
            value,
            seed,
            wall_time_ms,
        }
    }
}

/// Floats print with 17 significant digits, enough for an exact `f64`
/// round-trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Quotes a field when it contains a comma, quote, or newline, doubling any
/// embedded quotes (the usual CSV convention).
fn quote_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "scenario,param_json,metric,value,seed,wall_time_ms";

/// Renders records to CSV text (header always present).
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&quote_field(&r.scenario));
        out.push(',');
        out.push_str(&quote_field(&r.param_json));
        out.push(',');
        out.push_str(&quote_field(&r.metric));
        out.push(',');
        out.push_str(&format_float(r.value));
        out.push(',');
        out.push_str(&r.seed.to_string());
        out.push(',');
        out.push_str(&r.wall_time_ms.to_string());
        out.push('\n');
    }
    out
}

/// Writes records as CSV; an empty slice produces a header-only file.
pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(to_csv(records).as_bytes())?;
    Ok(())
}
