//! Configuration, execution and report handling behind the `qpipcli` binary.

pub mod config;
pub mod report;
pub mod run;

use std::fmt;
use std::path::Path;

pub use config::{CircuitSource, Command, ExperimentConfig, Message, Protocol};
pub use report::{Assertion, ReportBody, ReportEnvelope, SCHEMA_VERSION};
pub use run::execute;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, config or report file.
    Usage(String),
    /// The core refused the run.
    Run(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Run(m) => write!(f, "run error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

pub fn read_report(path: &Path) -> Result<ReportEnvelope, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read report {}: {e}", path.display())))?;
    ReportEnvelope::from_json(&text)
}

/// Outcome of re-running a report's configuration.
pub struct Replay {
    pub report: ReportEnvelope,
    /// `Some(true)` when every numeric field matches the original; `None`
    /// when the seed was overridden and no comparison applies.
    pub identical: Option<bool>,
}

pub fn replay(original: &ReportEnvelope, seed: Option<u64>) -> Result<Replay, CliError> {
    let mut config = original.config.clone();
    config.output = None;
    if let Some(s) = seed {
        config.seed = s;
    }
    let report = execute(&config)?;
    let identical = match seed {
        Some(s) if s != original.config.seed => None,
        _ => Some(numeric_fields(&report) == numeric_fields(original)),
    };
    Ok(Replay { report, identical })
}

/// Everything a replay must reproduce: assertions, flags and the body.
pub fn numeric_fields(r: &ReportEnvelope) -> serde_json::Value {
    serde_json::json!({
        "negative_control": r.negative_control,
        "assertions": r.assertions,
        "body": r.body,
    })
}

/// Human-readable summary printed after a run.
pub fn summary(r: &ReportEnvelope) -> String {
    let mut out = format!(
        "qpipcli {} (seed {}, {:.2} s)\n",
        r.config.command.name(),
        r.config.seed,
        r.wall_time_s
    );
    if r.negative_control {
        out.push_str("NEGATIVE CONTROL: this run exercises the broken per-round-check variant\n");
    }
    for a in &r.assertions {
        let status = match (a.holds, a.informational) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "info",
            (false, true) => "info!",
        };
        out.push_str(&format!(
            "{status:5} {}: {:.6e} vs bound {:.6e} (band {:.1e})\n",
            a.name, a.value, a.bound, a.band
        ));
    }
    out
}

pub fn exit_code(r: &ReportEnvelope) -> i32 {
    if r.failed().is_empty() {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    }
}
