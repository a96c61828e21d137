//! Versioned JSON report envelope and CSV sweep rows.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CorrError, Result};

pub const REPORT_SCHEMA: &str = "corrsim-report/1";
pub const UNITS: &str = "bits";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Deterministic part of a report: identical inputs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBody<T: Serialize> {
    pub schema: &'static str,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    /// The statement this run checks or illustrates.
    pub claim: String,
    pub units: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub result: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub body: ReportBody<T>,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub timestamp: u64,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: impl Into<String>, claim: impl Into<String>, seed: Option<u64>, config: serde_json::Value, result: T) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            body: ReportBody {
                schema: REPORT_SCHEMA,
                tool: "corrsim",
                tool_version: TOOL_VERSION,
                command: command.into(),
                claim: claim.into(),
                units: UNITS,
                seed,
                config,
                result,
            },
            timestamp,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| CorrError::Parse(e.to_string()))
    }

    pub fn body_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.body).map_err(|e| CorrError::Parse(e.to_string()))
    }
}

/// One row of a sweep: a seed and the swept parameter (`N` or `n`).
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct SweepRow {
    pub seed: u64,
    pub param: f64,
    pub achieved_eps: f64,
    pub log_n: f64,
    pub shannon: f64,
    pub entropy_exchange: f64,
}
