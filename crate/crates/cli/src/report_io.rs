//! CSV and JSON report files.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! reports always produce equal bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nlslab_core::experiments::ExperimentReport;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const TOOL: &str = "nlslab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run identity recorded in the JSON summary.
#[derive(Clone, Copy, Debug)]
pub struct RunInfo<'a> {
    pub config_bytes: &'a [u8],
    pub seed: u64,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn csv_bytes(report: &ExperimentReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once(report.sweep_key.as_str())
        .chain(report.columns.iter().map(String::as_str))
        .chain(report.error_columns.iter().map(String::as_str));
    w.write_record(header)?;
    for row in &report.rows {
        let fields = std::iter::once(row.key.clone())
            .chain(row.values.iter().map(|v| v.to_string()))
            .chain(row.errors.iter().map(|v| v.to_string()));
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Non-finite values have no JSON form; they are written as strings.
fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

pub fn json_value(report: &ExperimentReport, info: RunInfo<'_>) -> Value {
    let provenance: BTreeMap<&str, &str> = report.provenance.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "key": r.key,
                "values": r.values.iter().copied().map(number).collect::<Vec<_>>(),
                "errors": r.errors.iter().copied().map(number).collect::<Vec<_>>(),
            })
        })
        .collect();
    let verdicts: Vec<Value> =
        report.verdicts.iter().map(|v| json!({"name": v.name, "passed": v.passed, "detail": v.detail})).collect();
    json!({
        "tool": TOOL,
        "version": TOOL_VERSION,
        "kind": report.kind,
        "config_sha256": config_hash(info.config_bytes),
        "seed": info.seed,
        "overall": report.overall(),
        "verdicts": verdicts,
        "sweep_key": report.sweep_key,
        "columns": report.columns,
        "error_columns": report.error_columns,
        "rows": rows,
        "provenance": provenance,
    })
}

/// Writes both files; I/O errors carry the offending path.
pub fn emit_report(report: &ExperimentReport, csv_path: &Path, json_path: &Path, info: RunInfo<'_>) -> Result<(), CliError> {
    let csv = csv_bytes(report).map_err(|e| CliError::output(csv_path, std::io::Error::other(e)))?;
    fs::write(csv_path, csv).map_err(|e| CliError::output(csv_path, e))?;
    let mut text = serde_json::to_string_pretty(&json_value(report, info)).expect("report serializes");
    text.push('\n');
    fs::write(json_path, text).map_err(|e| CliError::output(json_path, e))
}
