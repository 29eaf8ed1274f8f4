//! Statistical and exact audits of the protocols: completeness and
//! soundness estimates, blindness, confidence and the identity suite.

pub mod blindness;
pub mod confidence;
pub mod experiment;
pub mod lemmas;
pub mod policy;
pub mod stats;

pub use blindness::{blindness_audit, halving_regression, BlindnessRecord, KeyAverageMode, ViewDistance};
pub use confidence::{clifford_confidence, poly_confidence, poly_confidence_scan, ConfidenceRecord, BETA_FLOOR};
pub use lemmas::{lemma_suite, LemmaCheck, LemmaGroup, LemmaLedger, LemmaScope, COVERAGE};
pub use experiment::{estimate_completeness, estimate_soundness, run_experiment, ExperimentReport, ProtocolConfig};
pub use policy::{named_policy, shipped_policies, AdversaryPolicy, PolicyProver, RoundSel, POLICY_NAMES};
pub use stats::{chi2_sf, chi2_uniform, wilson_interval, Interval};
