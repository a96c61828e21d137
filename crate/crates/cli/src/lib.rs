//! Command-line front end for the corrsim experiments.

pub mod args;
pub mod input;
pub mod run;
pub mod validate;

use std::io::Write;
use std::path::Path;

use corrsim::{CorrError, Report};
use serde_json::json;

use crate::args::{Cli, RunConfig};
use crate::run::Output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_UNKNOWN_STATE: i32 = 3;
pub const EXIT_DIM_CAP: i32 = 4;

pub fn exit_code(e: &CorrError) -> i32 {
    match e {
        CorrError::UnknownState { .. } => EXIT_UNKNOWN_STATE,
        CorrError::DimensionCap { .. } => EXIT_DIM_CAP,
        _ => EXIT_PRECONDITION,
    }
}

fn error_kind(e: &CorrError) -> &'static str {
    match e {
        CorrError::DimensionCap { .. } => "dimension_cap",
        CorrError::Index(_) => "index",
        CorrError::DimensionMismatch { .. } => "dimension_mismatch",
        CorrError::ContractViolation(_) => "contract_violation",
        CorrError::InvariantViolation(_) => "invariant_violation",
        CorrError::Domain(_) => "domain",
        CorrError::Precondition(_) => "precondition",
        CorrError::Protocol(_) => "protocol",
        CorrError::InternalConsistency(_) => "internal_consistency",
        CorrError::UnknownState { .. } => "unknown_state",
        CorrError::Parse(_) => "parse",
    }
}

pub fn error_json(e: &CorrError) -> String {
    json!({ "error": { "kind": error_kind(e), "message": e.to_string(), "exit_code": exit_code(e) } }).to_string()
}

/// Writes `content` to `out`, or standard output for `-`, via a temporary file and rename.
pub fn write_output(out: &str, content: &str) -> Result<(), CorrError> {
    let io = |e: std::io::Error| CorrError::Precondition(format!("cannot write {out}: {e}"));
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(content.as_bytes()).map_err(io)?;
        if !content.ends_with('\n') {
            stdout.write_all(b"\n").map_err(io)?;
        }
        return Ok(());
    }
    let path = Path::new(out);
    let name = path.file_name().ok_or_else(|| CorrError::Precondition(format!("`{out}` is not a file path")))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = std::fs::write(&tmp, content).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

fn execute(cli: Cli) -> Result<(), CorrError> {
    let config = RunConfig { command: cli.command, format: cli.format };
    if cli.dry_run {
        let diagnostics = validate::validate(&config);
        let config_json = serde_json::to_value(&config).map_err(|e| CorrError::Parse(e.to_string()))?;
        let report = Report::new(
            "validate",
            "configuration checks",
            Some(config.command.seed()),
            config_json,
            json!({ "subcommand": config.command.name(), "diagnostics": diagnostics }),
        );
        return write_output(&cli.out, &report.to_json()?);
    }
    let (output, _) = run::run(&config)?;
    match output {
        Output::Json(s) | Output::Csv(s) => write_output(&cli.out, &s),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}
