//! Versioned report envelope written by every subcommand.

use serde::{Deserialize, Serialize};

use qpip_core::audit::{BlindnessRecord, ConfidenceRecord, ExperimentReport, LemmaLedger};
use qpip_core::cliffauth::SecurityRecord;
use qpip_core::pcalg::pauli::SymbolicPauli;
use qpip_core::polyauth::PolySecurityRecord;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One numeric claim with the bound it is held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// Allowed excess over `bound` (numerical tolerance or a 3-sigma band).
    pub band: f64,
    pub holds: bool,
    /// Reported but not counted towards the exit status.
    #[serde(default)]
    pub informational: bool,
}

impl Assertion {
    /// `value <= bound + band`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, band: f64) -> Self {
        Assertion {
            name: name.into(),
            value,
            bound,
            band,
            holds: value <= bound + band,
            informational: false,
        }
    }

    /// `value > bound + band`: used where exceeding the bound is the point.
    pub fn exceeds(name: impl Into<String>, value: f64, bound: f64, band: f64) -> Self {
        Assertion {
            name: name.into(),
            value,
            bound,
            band,
            holds: value > bound + band,
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSecurity<T> {
    pub attack: String,
    pub record: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub q: u32,
    pub d: usize,
    pub m: usize,
    pub max_mass: f64,
    /// `1/2^{m-1}`, from at most two correlated sign keys per Pauli.
    pub proof_bound: f64,
    /// `2^{-d}`.
    pub stated_bound: f64,
    pub maximizers: Vec<SymbolicPauli>,
    /// `keys_histogram[j]`: non-identity Paulis correlated with exactly `j` sign keys.
    pub keys_histogram: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportBody {
    Lemmas(LemmaLedger),
    CliffordSecurity { records: Vec<LabeledSecurity<SecurityRecord>> },
    PolySecurity { records: Vec<LabeledSecurity<PolySecurityRecord>> },
    Scan(ScanSummary),
    Experiment(ExperimentReport),
    Blindness(BlindnessRecord),
    Confidence {
        records: Vec<ConfidenceRecord>,
        /// Policies skipped because the audit refused them, with the reason.
        skipped: Vec<(String, String)>,
    },
    Zeno { broken: ExperimentReport, fixed: ExperimentReport },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
    /// Set when the run exercises a deliberately broken protocol variant.
    pub negative_control: bool,
    pub assertions: Vec<Assertion>,
    pub body: ReportBody,
}

impl ReportEnvelope {
    pub fn failed(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.informational && !a.holds).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Parses a report, checking the schema version before the body.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("report is not valid JSON: {e}")))?;
        match raw.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => {
                return Err(CliError::Usage(format!(
                    "report schema version {v} is not supported (expected {SCHEMA_VERSION})"
                )))
            }
            None => return Err(CliError::Usage("report has no schema_version".into())),
        }
        serde_json::from_value(raw).map_err(|e| CliError::Usage(format!("report does not match the schema: {e}")))
    }
}
