#![allow(dead_code)]

use qpip_cli::{CircuitSource, Command, ExperimentConfig, Message, Protocol};
use qpip_core::audit::{named_policy, AdversaryPolicy, KeyAverageMode, LemmaGroup, LemmaScope};
use qpip_core::polycode::CodeParams;
use qpip_core::qpip::PolyEngine;

pub fn code() -> CodeParams {
    CodeParams::new(5, 1, vec![1, 2, 3]).unwrap()
}

fn cfg(seed: u64, command: Command) -> ExperimentConfig {
    ExperimentConfig {
        seed,
        output: None,
        command,
    }
}

/// One small configuration per subcommand; also the golden-file set.
pub fn sample_configs() -> Vec<(&'static str, ExperimentConfig)> {
    vec![
        (
            "lemmas",
            cfg(
                1,
                Command::Lemmas {
                    code: code(),
                    scope: LemmaScope::Group(LemmaGroup::Code),
                },
            ),
        ),
        (
            "qas-clifford",
            cfg(
                2,
                Command::QasClifford {
                    l: 1,
                    e: 1,
                    random_unitaries: 2,
                    sampled_keys: None,
                },
            ),
        ),
        (
            "qas-poly",
            cfg(
                3,
                Command::QasPoly {
                    code: code(),
                    message: Message::Basis(2),
                    random_unitaries: 1,
                    literal_check: false,
                },
            ),
        ),
        (
            "scan-signkey",
            cfg(
                4,
                Command::ScanSignkey {
                    code: code(),
                    message: Message::Basis(0),
                },
            ),
        ),
        (
            "qpip-clifford",
            cfg(
                5,
                Command::QpipClifford {
                    e: 1,
                    broken_variant: false,
                    circuit: CircuitSource::builtin("biased"),
                    input: vec![0, 0],
                    adversary: named_policy("x-flip", 2).unwrap(),
                    trials: 300,
                    transcript: None,
                },
            ),
        ),
        (
            "qpip-poly",
            cfg(
                6,
                Command::QpipPoly {
                    code: code(),
                    engine: PolyEngine::Dense,
                    circuit: CircuitSource::Inline {
                        dims: vec![5],
                        gates: "x:0; mr2:0".into(),
                        gamma: 0.0,
                    },
                    input: vec![0],
                    adversary: AdversaryPolicy::Honest,
                    trials: 100,
                    transcript: None,
                },
            ),
        ),
        (
            "blindness",
            cfg(
                7,
                Command::Blindness {
                    protocol: Protocol::Clifford { e: 1 },
                    circuit: CircuitSource::builtin("biased"),
                    input_a: vec![0, 0],
                    input_b: vec![1, 0],
                    mode: KeyAverageMode::Exact,
                },
            ),
        ),
        (
            "confidence",
            cfg(
                8,
                Command::Confidence {
                    protocol: Protocol::Poly { code: code() },
                    circuit: CircuitSource::builtin("shift"),
                    input: vec![0],
                    adversaries: vec![named_policy("x-flip", 3).unwrap(), named_policy("z-flip", 3).unwrap()],
                },
            ),
        ),
        (
            "zeno-demo",
            cfg(
                9,
                Command::ZenoDemo {
                    e: 1,
                    gates: 40,
                    trials: 200,
                },
            ),
        ),
    ]
}

/// Compares two JSON trees, allowing `tol` relative slack on numbers.
pub fn json_close(a: &serde_json::Value, b: &serde_json::Value, tol: f64, path: &str) -> Result<(), String> {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())) {
                Ok(())
            } else {
                Err(format!("{path}: {x} vs {y}"))
            }
        }
        (Array(x), Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: length {} vs {}", x.len(), y.len()));
            }
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                json_close(u, v, tol, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (Object(x), Object(y)) => {
            let mut keys: Vec<_> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => json_close(u, v, tol, &format!("{path}.{k}"))?,
                    _ => return Err(format!("{path}.{k}: present on one side only")),
                }
            }
            Ok(())
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} vs {b}")),
    }
}
