//! File-driven front end: scenario parsing, certification, runs and reports.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod family;
pub mod scenario;

use std::path::Path;

use ifc_core::certify::CertFailure;
use ifc_core::engine::EngineError;
use ifc_core::ifun::IfunError;
use ifc_core::NumError;
use thiserror::Error;

pub use commands::{Outcome, RunReport};
pub use scenario::{ParseError, ScenarioFile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_UNCERTIFIED: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("I/O: {0}")]
    Io(String),
    #[error("{0}")]
    Certification(CertFailure),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Axiom(#[from] IfunError),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Certification(_) => EXIT_UNCERTIFIED,
            CliError::Engine(EngineError::InvalidInput(_)) => EXIT_INPUT,
            CliError::Engine(_) | CliError::Axiom(_) | CliError::Num(_) => EXIT_RUNTIME,
        }
    }
}

/// Writes the report (and trace, if any) into `dir` using the names from the
/// scenario's output block.
pub fn write_outputs(file: &ScenarioFile, outcome: &Outcome, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let report_name = file.output.report.as_deref().unwrap_or("report.json");
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serialises");
    let path = dir.join(report_name);
    std::fs::write(&path, json + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if let Some(csv) = &outcome.trace_csv {
        let trace_name = file.output.trace.as_deref().unwrap_or("trace.csv");
        let path = dir.join(trace_name);
        std::fs::write(&path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
