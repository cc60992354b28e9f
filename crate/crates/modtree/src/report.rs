//! Structured result documents emitted by the CLI.
//!
//! A report echoes the inputs, carries the command-specific outcome as a
//! JSON value, and is schema-versioned so machine consumers can reject
//! documents they do not understand. JSON serialization uses the shortest
//! representation that round-trips each f64 bit-exactly, so reports parse
//! back losslessly.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ModtreeError, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Subcommand that produced this report.
    pub command: String,
    /// Echo of the parsed inputs.
    pub inputs: Value,
    /// Command-specific structured outcome.
    pub outcome: Value,
    /// Present when the command failed; `outcome` is null in that case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(command: &str, inputs: Value, outcome: Value, wall_time_ms: f64) -> Report {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outcome,
            error: None,
            wall_time_ms,
        }
    }

    pub fn failure(command: &str, inputs: Value, error: String, wall_time_ms: f64) -> Report {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outcome: Value::Null,
            error: Some(error),
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize infallibly")
    }

    pub fn from_json(json: &str) -> Result<Report> {
        let report: Report =
            serde_json::from_str(json).map_err(|e| ModtreeError::Schema(e.to_string()))?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(ModtreeError::Schema(format!(
                "unsupported report schema_version {} (expected {REPORT_SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }
}
