//! Ingestion of static-analysis suspect reports.
//!
//! A report file is a UTF-8 JSON array of case objects with five required
//! fields: `id`, `variable`, `caller`, `file`, `line`. Unknown extra fields
//! are preserved but ignored. The `variable` field may carry a field path or
//! index (`cap_rid.softCap`, `pages[j]`); it is kept as an opaque string and
//! never structurally resolved.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One static-analysis suspect: a variable, the function housing its use,
/// and the use location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub id: String,
    pub variable: String,
    pub caller: String,
    pub file: String,
    pub line: u32,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read report file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed report document at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("record {index}: missing or invalid field `{field}`")]
    Schema { index: usize, field: &'static str },
    #[error("record {index}: duplicate id `{id}`")]
    DuplicateId { index: usize, id: String },
    #[error("record {index}: {msg}")]
    Invalid { index: usize, msg: String },
}

/// Parse and validate a report file, preserving document order.
pub fn parse_report_file(path: &Path) -> Result<Vec<BugReport>, ReportError> {
    let text = std::fs::read_to_string(path)?;
    parse_report_str(&text)
}

/// Parse a report document from memory.
pub fn parse_report_str(text: &str) -> Result<Vec<BugReport>, ReportError> {
    let values: Vec<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    let mut reports = Vec::with_capacity(values.len());
    let mut seen = BTreeSet::new();
    for (index, value) in values.into_iter().enumerate() {
        let report = record_from_value(index, value)?;
        if !seen.insert(report.id.clone()) {
            return Err(ReportError::DuplicateId {
                index,
                id: report.id,
            });
        }
        validate(index, &report)?;
        reports.push(report);
    }
    Ok(reports)
}

fn parse_error(text: &str, e: serde_json::Error) -> ReportError {
    ReportError::Parse {
        offset: byte_offset(text, e.line(), e.column()),
        msg: e.to_string(),
    }
}

/// serde_json reports 1-based line/column; map back to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (n, l) in text.split_inclusive('\n').enumerate() {
        if n + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len();
    }
    text.len()
}

fn record_from_value(index: usize, value: serde_json::Value) -> Result<BugReport, ReportError> {
    let serde_json::Value::Object(mut map) = value else {
        return Err(ReportError::Invalid {
            index,
            msg: "record is not an object".into(),
        });
    };
    let mut field_str = |field: &'static str| -> Result<String, ReportError> {
        match map.remove(field) {
            Some(serde_json::Value::String(s)) => Ok(s),
            _ => Err(ReportError::Schema { index, field }),
        }
    };
    let id = field_str("id")?;
    let variable = field_str("variable")?;
    let caller = field_str("caller")?;
    let file = field_str("file")?;
    let line = match map.remove("line") {
        Some(serde_json::Value::Number(n)) => n
            .as_u64()
            .and_then(|v| u32::try_from(v).ok())
            .ok_or(ReportError::Schema { index, field: "line" })?,
        _ => return Err(ReportError::Schema { index, field: "line" }),
    };
    Ok(BugReport {
        id,
        variable,
        caller,
        file,
        line,
        extra: map,
    })
}

fn validate(index: usize, report: &BugReport) -> Result<(), ReportError> {
    let non_empty = |field: &'static str, value: &str| {
        if value.is_empty() {
            Err(ReportError::Invalid {
                index,
                msg: format!("field `{field}` is empty"),
            })
        } else {
            Ok(())
        }
    };
    non_empty("id", &report.id)?;
    non_empty("variable", &report.variable)?;
    non_empty("caller", &report.caller)?;
    if report.line < 1 {
        return Err(ReportError::Invalid {
            index,
            msg: "line must be >= 1".into(),
        });
    }
    Ok(())
}

/// Serialize reports back to the document format.
pub fn to_report_document(reports: &[BugReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
