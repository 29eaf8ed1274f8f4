//! Experiment configuration: everything that, with the seed, determines a run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qpip_core::audit::{AdversaryPolicy, KeyAverageMode, LemmaScope};
use qpip_core::pcalg::gates::{Gate, GateTag};
use qpip_core::polycode::CodeParams;
use qpip_core::qcore::rng::seeded;
use qpip_core::qcore::DEFAULT_DIM_CAP;
use qpip_core::qpip::circuit::{CircuitIR, CircuitOp};
use qpip_core::qpip::clifford::{biased_test_circuit, zeno_test_circuit};
use qpip_core::qpip::PolyEngine;

use crate::CliError;

pub const DEFAULT_TRIALS: usize = 10_000;
/// Seed of the random unitaries inside the built-in `biased` circuit.
pub const BIASED_CIRCUIT_SEED: u64 = 9;
pub const SEED_ENV: &str = "QPIP_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    Lemmas {
        code: CodeParams,
        scope: LemmaScope,
    },
    QasClifford {
        l: usize,
        e: usize,
        /// Random unitary attacks on top of every non-identity Pauli.
        random_unitaries: usize,
        /// `None`: exact average over the enumerated group.
        sampled_keys: Option<usize>,
    },
    QasPoly {
        code: CodeParams,
        message: Message,
        random_unitaries: usize,
        /// Also evaluate one attack by literal summation over every Pauli key.
        literal_check: bool,
    },
    ScanSignkey {
        code: CodeParams,
        message: Message,
    },
    QpipClifford {
        e: usize,
        #[serde(default)]
        broken_variant: bool,
        circuit: CircuitSource,
        input: Vec<u32>,
        adversary: AdversaryPolicy,
        trials: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transcript: Option<PathBuf>,
    },
    QpipPoly {
        code: CodeParams,
        engine: PolyEngine,
        circuit: CircuitSource,
        input: Vec<u32>,
        adversary: AdversaryPolicy,
        trials: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transcript: Option<PathBuf>,
    },
    Blindness {
        protocol: Protocol,
        circuit: CircuitSource,
        input_a: Vec<u32>,
        input_b: Vec<u32>,
        mode: KeyAverageMode,
    },
    Confidence {
        protocol: Protocol,
        circuit: CircuitSource,
        input: Vec<u32>,
        adversaries: Vec<AdversaryPolicy>,
    },
    ZenoDemo {
        e: usize,
        gates: usize,
        trials: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lemmas { .. } => "lemmas",
            Command::QasClifford { .. } => "qas-clifford",
            Command::QasPoly { .. } => "qas-poly",
            Command::ScanSignkey { .. } => "scan-signkey",
            Command::QpipClifford { .. } => "qpip-clifford",
            Command::QpipPoly { .. } => "qpip-poly",
            Command::Blindness { .. } => "blindness",
            Command::Confidence { .. } => "confidence",
            Command::ZenoDemo { .. } => "zeno-demo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum Protocol {
    Clifford { e: usize },
    Poly { code: CodeParams },
}

/// One-qudit message of an authentication experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Message {
    Basis(u32),
    /// Haar-random, drawn from the run's seed.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum CircuitSource {
    /// `biased`, `zeno`, `shift` or `toffoli`.
    Builtin { name: String },
    /// Gate list such as `f:0; sum:0,1; x^2:1` on wires of the given dimensions.
    Inline { dims: Vec<usize>, gates: String, gamma: f64 },
    File { path: PathBuf },
    Ir { circuit: CircuitIR },
}

pub const BUILTIN_CIRCUITS: &[&str] = &["biased", "zeno", "shift", "toffoli"];

impl CircuitSource {
    pub fn builtin(name: &str) -> Self {
        CircuitSource::Builtin { name: name.into() }
    }

    pub fn resolve(&self) -> Result<CircuitIR, CliError> {
        let c = match self {
            CircuitSource::Builtin { name } => builtin_circuit(name)?,
            CircuitSource::Inline { dims, gates, gamma } => {
                CircuitIR::new(dims.clone(), parse_gates(gates)?, *gamma).map_err(|e| usage("circuit.gates", e))?
            }
            CircuitSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("circuit.path: cannot read {}: {e}", path.display())))?;
                let c: CircuitIR = serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("circuit.path: {}: {e}", path.display())))?;
                c.validate().map_err(|e| usage("circuit.path", e))?;
                c
            }
            CircuitSource::Ir { circuit } => {
                circuit.validate().map_err(|e| usage("circuit.circuit", e))?;
                circuit.clone()
            }
        };
        Ok(c)
    }
}

pub fn builtin_circuit(name: &str) -> Result<CircuitIR, CliError> {
    let r = match name {
        "biased" => biased_test_circuit(&mut seeded(BIASED_CIRCUIT_SEED)),
        "zeno" => zeno_test_circuit(40),
        "shift" => CircuitIR::new(
            vec![5],
            vec![
                CircuitOp::Gate {
                    gate: Gate::pow(GateTag::X, 2),
                    wires: vec![0],
                },
                CircuitOp::gate(GateTag::F, &[0]),
                CircuitOp::gate(GateTag::F, &[0]),
            ],
            0.0,
        ),
        "toffoli" => CircuitIR::new(vec![5; 3], vec![CircuitOp::gate(GateTag::Toffoli, &[1, 2, 0])], 0.0),
        other => {
            return Err(CliError::Usage(format!(
                "circuit.name: unknown built-in circuit {other:?}; expected one of {BUILTIN_CIRCUITS:?}"
            )))
        }
    };
    r.map_err(|e| usage("circuit.name", e))
}

/// Parses `tag[^power]:w,w,...` items separated by `;`. Tags: `f`, `fr<r>`,
/// `sum`, `toffoli`, `mr<r>`, `cpg`, `x`, `z`, `h`, `k`, `cnot`.
pub fn parse_gates(text: &str) -> Result<Vec<CircuitOp>, CliError> {
    let mut ops = Vec::new();
    for (i, item) in text.split(';').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
        let bad = |msg: &str| CliError::Usage(format!("circuit.gates[{i}] {item:?}: {msg}"));
        let (head, wires) = item.split_once(':').ok_or_else(|| bad("expected tag:wires"))?;
        let (tag, power) = match head.trim().split_once('^') {
            Some((t, p)) => (t.trim(), p.trim().parse::<u32>().map_err(|_| bad("bad power"))?),
            None => (head.trim(), 1),
        };
        let tag = parse_tag(&tag.to_ascii_lowercase()).ok_or_else(|| bad("unknown gate tag"))?;
        let wires = wires
            .split(',')
            .map(|w| w.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("wires must be integers"))?;
        ops.push(CircuitOp::Gate {
            gate: Gate::pow(tag, power),
            wires,
        });
    }
    Ok(ops)
}

fn parse_tag(t: &str) -> Option<GateTag> {
    Some(match t {
        "f" => GateTag::F,
        "sum" => GateTag::Sum,
        "toffoli" => GateTag::Toffoli,
        "cpg" => GateTag::Cpg,
        "x" => GateTag::X,
        "z" => GateTag::Z,
        "h" => GateTag::H,
        "k" => GateTag::K,
        "cnot" => GateTag::Cnot,
        _ => {
            if let Some(r) = t.strip_prefix("fr") {
                GateTag::Fr(r.parse().ok()?)
            } else if let Some(r) = t.strip_prefix("mr") {
                GateTag::Mr(r.parse().ok()?)
            } else {
                return None;
            }
        }
    })
}

fn usage(field: &str, e: qpip_core::Error) -> CliError {
    CliError::Usage(format!("{field}: {e}"))
}

impl ExperimentConfig {
    /// Field-level checks that do not need a run. Everything else is
    /// validated by the core when the run starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let err = |field: &str, msg: &str| Err(CliError::Usage(format!("{}.{field}: {msg}", self.command.name())));
        match &self.command {
            Command::Lemmas { .. } | Command::ScanSignkey { .. } => {}
            Command::QasClifford { l, e, sampled_keys, .. } => {
                if *l == 0 || *e == 0 {
                    return err("l/e", "need at least one message and one auxiliary qubit");
                }
                if sampled_keys.is_none() && l + e > 2 {
                    return err("sampled_keys", "exact averaging enumerates at most two-qubit Clifford groups");
                }
                if sampled_keys == &Some(0) {
                    return err("sampled_keys", "must be positive");
                }
                if l + e + 1 > 12 {
                    return err("l/e", "register exceeds the dense simulation cap");
                }
            }
            Command::QasPoly { code, .. } => {
                if code.m() != 3 {
                    return err("code.d", "the exhaustive key averages support d = 1 only");
                }
            }
            Command::QpipClifford {
                e,
                circuit,
                input,
                trials,
                ..
            } => {
                if *trials == 0 {
                    return err("trials", "must be positive");
                }
                if *e == 0 {
                    return err("e", "must be positive");
                }
                let c = circuit.resolve()?;
                if input.len() != c.num_wires() || input.iter().any(|&b| b > 1) {
                    return err("input", "one bit per circuit wire");
                }
                let dim = 1u128 << (c.num_wires() * (e + 1)).min(127);
                if dim > DEFAULT_DIM_CAP as u128 {
                    return err("e", "encoded register exceeds the dimension cap");
                }
            }
            Command::QpipPoly {
                code,
                circuit,
                input,
                trials,
                ..
            } => {
                if *trials == 0 {
                    return err("trials", "must be positive");
                }
                let c = circuit.resolve()?;
                if input.len() != c.num_wires() || input.iter().any(|&a| a >= code.q()) {
                    return err("input", "one field element per circuit wire");
                }
                if c.wire_dim() != Some(code.q() as usize) {
                    return err("circuit", "wire dimension must equal the code's field size");
                }
            }
            Command::Blindness {
                circuit,
                input_a,
                input_b,
                mode,
                ..
            } => {
                let c = circuit.resolve()?;
                if input_a.len() != c.num_wires() || input_b.len() != c.num_wires() {
                    return err("input_a/input_b", "one value per circuit wire");
                }
                if matches!(mode, KeyAverageMode::Sampled { keys: 0 }) {
                    return err("mode.keys", "must be positive");
                }
            }
            Command::Confidence {
                circuit,
                input,
                adversaries,
                ..
            } => {
                let c = circuit.resolve()?;
                if input.len() != c.num_wires() {
                    return err("input", "one value per circuit wire");
                }
                if adversaries.is_empty() {
                    return err("adversaries", "at least one policy");
                }
            }
            Command::ZenoDemo { e, gates, trials } => {
                if *e != 1 {
                    return err("e", "the slow-rotation attack acts on two-qubit blocks (e = 1)");
                }
                if *gates == 0 || *trials == 0 {
                    return err("gates/trials", "must be positive");
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_lists_parse() {
        let ops = parse_gates("f:0; sum:0,1 ; x^2:1; fr3:0; mr2:1").unwrap();
        assert_eq!(ops.len(), 5);
        assert_eq!(
            ops[2],
            CircuitOp::Gate {
                gate: Gate::pow(GateTag::X, 2),
                wires: vec![1]
            }
        );
        assert!(parse_gates("nope:0").is_err());
        assert!(parse_gates("f").is_err());
        assert!(parse_gates("f:a").is_err());
    }

    #[test]
    fn builtins_resolve() {
        for name in BUILTIN_CIRCUITS {
            CircuitSource::builtin(name).resolve().unwrap();
        }
        assert!(builtin_circuit("missing").is_err());
    }
}
