use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qpip_cli::config::{CircuitSource, Command, ExperimentConfig, Message, Protocol, DEFAULT_TRIALS, SEED_ENV};
use qpip_cli::{exit_code, read_config, read_report, replay, summary, CliError, ReportEnvelope, EXIT_ASSERTION, EXIT_OK, EXIT_USAGE};
use qpip_core::audit::{named_policy, shipped_policies, AdversaryPolicy, KeyAverageMode, LemmaGroup, LemmaScope};
use qpip_core::polycode::CodeParams;
use qpip_core::qpip::PolyEngine;

#[derive(Parser)]
#[command(name = "qpipcli", version, about = "Run authentication, interactive-proof and audit experiments")]
struct Cli {
    /// Experiment seed.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    /// Report path (default: <subcommand>.report.json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit without running.
    #[arg(long, global = true)]
    emit_config: bool,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, default_value_t = 5)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Evaluation points (default 1..=2d+1).
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<u32>,
}

impl CodeArgs {
    fn params(&self) -> Result<CodeParams, CliError> {
        let alphas = if self.alphas.is_empty() {
            (1..=(2 * self.d + 1) as u32).collect()
        } else {
            self.alphas.clone()
        };
        CodeParams::new(self.q, self.d, alphas).map_err(|e| CliError::Usage(format!("code: {e}")))
    }
}

#[derive(Args, Clone)]
struct CircuitArgs {
    /// Built-in circuit: biased, zeno, shift or toffoli.
    #[arg(long)]
    circuit: Option<String>,
    /// Inline gate list, e.g. "f:0; sum:0,1"; needs --dims.
    #[arg(long, conflicts_with_all = ["circuit", "circuit_file"])]
    gates: Option<String>,
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Circuit JSON file.
    #[arg(long, conflicts_with = "circuit")]
    circuit_file: Option<PathBuf>,
}

impl CircuitArgs {
    fn source(&self, default: &str) -> Result<CircuitSource, CliError> {
        if let Some(g) = &self.gates {
            if self.dims.is_empty() {
                return Err(CliError::Usage("--gates needs --dims".into()));
            }
            return Ok(CircuitSource::Inline {
                dims: self.dims.clone(),
                gates: g.clone(),
                gamma: self.gamma,
            });
        }
        if let Some(p) = &self.circuit_file {
            return Ok(CircuitSource::File { path: p.clone() });
        }
        Ok(CircuitSource::builtin(self.circuit.as_deref().unwrap_or(default)))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Clifford,
    Poly,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Dense,
    Frame,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Code,
    Averaging,
    Security,
    Correlation,
    Gadget,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the identity suite.
    Lemmas {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum)]
        group: Option<GroupArg>,
        /// Comma-separated check names.
        #[arg(long, value_delimiter = ',', conflicts_with = "group")]
        only: Vec<String>,
    },
    /// Clifford authentication security against every Pauli and random unitaries.
    QasClifford {
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        e: usize,
        #[arg(long, default_value_t = 5)]
        unitaries: usize,
        /// Average over sampled Clifford keys instead of the whole group.
        #[arg(long)]
        sampled_keys: Option<usize>,
    },
    /// Polynomial authentication security against random unitaries.
    QasPoly {
        #[command(flatten)]
        code: CodeArgs,
        /// Basis value or "random".
        #[arg(long, default_value = "random")]
        message: String,
        #[arg(long, default_value_t = 5)]
        unitaries: usize,
        #[arg(long)]
        literal_check: bool,
    },
    /// Exhaustive sign-key averaged acceptance mass of every Pauli.
    ScanSignkey {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = "0")]
        message: String,
    },
    /// Clifford interactive proof, repeated trials.
    QpipClifford {
        #[arg(long, default_value_t = 1)]
        e: usize,
        #[arg(long)]
        broken_variant: bool,
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Input values (default all zero).
        #[arg(long, value_delimiter = ',')]
        input: Vec<u32>,
        /// Named policy or a JSON policy object.
        #[arg(long, default_value = "honest")]
        adversary: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Write the first trial's transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Polynomial-code interactive proof, repeated trials.
    QpipPoly {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "dense")]
        engine: EngineArg,
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_delimiter = ',')]
        input: Vec<u32>,
        #[arg(long, default_value = "honest")]
        adversary: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Compare the prover's views for two inputs.
    Blindness {
        #[arg(long, value_enum, default_value = "clifford")]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 1)]
        e: usize,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_delimiter = ',')]
        input_a: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        input_b: Vec<u32>,
        /// Sample this many keys (or runs) instead of averaging exactly.
        #[arg(long)]
        keys: Option<usize>,
    },
    /// Conditional output distance against Pauli policies.
    Confidence {
        #[arg(long, value_enum, default_value = "clifford")]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 1)]
        e: usize,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_delimiter = ',')]
        input: Vec<u32>,
        /// Repeatable; default: every shipped Pauli policy.
        #[arg(long)]
        adversary: Vec<String>,
    },
    /// Slow-rotation attack against the broken and the final-check Clifford protocol.
    ZenoDemo {
        #[arg(long, default_value_t = 1)]
        e: usize,
        #[arg(long, default_value_t = 40)]
        gates: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
    /// Run a JSON configuration file.
    Run { config: PathBuf },
    /// Re-run a report's configuration and compare.
    Replay {
        report: PathBuf,
        /// Run with another seed: same bounds, different samples.
        #[arg(long)]
        override_seed: Option<u64>,
    },
}

fn policy(text: &str, block_len: usize) -> Result<AdversaryPolicy, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("adversary: {e}")))
    } else {
        named_policy(text, block_len).map_err(|e| CliError::Usage(format!("adversary: {e}")))
    }
}

fn message(text: &str) -> Result<Message, CliError> {
    if text == "random" {
        return Ok(Message::Random);
    }
    text.parse()
        .map(Message::Basis)
        .map_err(|_| CliError::Usage(format!("message: expected a field element or \"random\", got {text:?}")))
}

fn default_input(input: &[u32], circuit: &CircuitSource) -> Result<Vec<u32>, CliError> {
    if !input.is_empty() {
        return Ok(input.to_vec());
    }
    Ok(vec![0; circuit.resolve()?.num_wires()])
}

fn build(cli: &Cli) -> Result<Option<ExperimentConfig>, CliError> {
    let command = match &cli.cmd {
        Sub::Run { .. } | Sub::Replay { .. } => return Ok(None),
        Sub::Lemmas { code, group, only } => {
            let scope = match (group, only.is_empty()) {
                (Some(g), _) => LemmaScope::Group(match g {
                    GroupArg::Code => LemmaGroup::Code,
                    GroupArg::Averaging => LemmaGroup::Averaging,
                    GroupArg::Security => LemmaGroup::Security,
                    GroupArg::Correlation => LemmaGroup::Correlation,
                    GroupArg::Gadget => LemmaGroup::Gadget,
                }),
                (None, false) => LemmaScope::Named(only.clone()),
                (None, true) => LemmaScope::All,
            };
            Command::Lemmas {
                code: code.params()?,
                scope,
            }
        }
        Sub::QasClifford {
            l,
            e,
            unitaries,
            sampled_keys,
        } => Command::QasClifford {
            l: *l,
            e: *e,
            random_unitaries: *unitaries,
            sampled_keys: *sampled_keys,
        },
        Sub::QasPoly {
            code,
            message: m,
            unitaries,
            literal_check,
        } => Command::QasPoly {
            code: code.params()?,
            message: message(m)?,
            random_unitaries: *unitaries,
            literal_check: *literal_check,
        },
        Sub::ScanSignkey { code, message: m } => Command::ScanSignkey {
            code: code.params()?,
            message: message(m)?,
        },
        Sub::QpipClifford {
            e,
            broken_variant,
            circuit,
            input,
            adversary,
            trials,
            transcript,
        } => {
            let circuit = circuit.source("biased")?;
            Command::QpipClifford {
                e: *e,
                broken_variant: *broken_variant,
                input: default_input(input, &circuit)?,
                circuit,
                adversary: policy(adversary, e + 1)?,
                trials: *trials,
                transcript: transcript.clone(),
            }
        }
        Sub::QpipPoly {
            code,
            engine,
            circuit,
            input,
            adversary,
            trials,
            transcript,
        } => {
            let code = code.params()?;
            let circuit = circuit.source("shift")?;
            Command::QpipPoly {
                input: default_input(input, &circuit)?,
                circuit,
                adversary: policy(adversary, code.m())?,
                engine: match engine {
                    EngineArg::Dense => PolyEngine::Dense,
                    EngineArg::Frame => PolyEngine::LogicalFrame,
                },
                trials: *trials,
                transcript: transcript.clone(),
                code,
            }
        }
        Sub::Blindness {
            protocol,
            e,
            code,
            circuit,
            input_a,
            input_b,
            keys,
        } => {
            let (protocol, default) = match protocol {
                ProtocolArg::Clifford => (Protocol::Clifford { e: *e }, "biased"),
                ProtocolArg::Poly => (Protocol::Poly { code: code.params()? }, "shift"),
            };
            let circuit = circuit.source(default)?;
            let a = default_input(input_a, &circuit)?;
            let b = if input_b.is_empty() {
                let mut b = a.clone();
                b[0] = 1 - a[0].min(1);
                b
            } else {
                input_b.clone()
            };
            Command::Blindness {
                protocol,
                circuit,
                input_a: a,
                input_b: b,
                mode: keys.map_or(KeyAverageMode::Exact, |k| KeyAverageMode::Sampled { keys: k }),
            }
        }
        Sub::Confidence {
            protocol,
            e,
            code,
            circuit,
            input,
            adversary,
        } => {
            let (protocol, default, block_len, dim) = match protocol {
                ProtocolArg::Clifford => (Protocol::Clifford { e: *e }, "biased", e + 1, 2),
                ProtocolArg::Poly => {
                    let c = code.params()?;
                    let (m, q) = (c.m(), c.q() as usize);
                    (Protocol::Poly { code: c }, "shift", m, q)
                }
            };
            let circuit = circuit.source(default)?;
            let adversaries = if adversary.is_empty() {
                shipped_policies(block_len, dim)
                    .map_err(|e| CliError::Usage(e.to_string()))?
                    .into_iter()
                    .filter(|p| matches!(p, AdversaryPolicy::FixedPauli { .. }))
                    .collect()
            } else {
                adversary.iter().map(|a| policy(a, block_len)).collect::<Result<_, _>>()?
            };
            Command::Confidence {
                protocol,
                input: default_input(input, &circuit)?,
                circuit,
                adversaries,
            }
        }
        Sub::ZenoDemo { e, gates, trials } => Command::ZenoDemo {
            e: *e,
            gates: *gates,
            trials: *trials,
        },
    };
    Ok(Some(ExperimentConfig {
        seed: cli.seed,
        output: cli.out.clone(),
        command,
    }))
}

/// Writes to stdout, ignoring a closed pipe.
fn say(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn finish(report: &ReportEnvelope, out: Option<&PathBuf>) -> Result<i32, CliError> {
    let default = PathBuf::from(format!("{}.report.json", report.config.command.name()));
    let path = out.cloned().or_else(|| report.config.output.clone()).unwrap_or(default);
    std::fs::write(&path, report.to_json())
        .map_err(|e| CliError::Run(format!("cannot write report {}: {e}", path.display())))?;
    say(&format!("{}report: {}\n", summary(report), path.display()));
    Ok(exit_code(report))
}

fn main_inner() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let config = match (&cli.cmd, build(&cli)?) {
        (Sub::Run { config }, _) => {
            let mut c = read_config(config)?;
            if cli.out.is_some() {
                c.output = cli.out.clone();
            }
            c
        }
        (Sub::Replay { report, override_seed }, _) => {
            let original = read_report(report)?;
            let r = replay(&original, *override_seed)?;
            if cli.emit_config {
                say(&format!("{}\n", serde_json::to_string_pretty(&r.report.config).expect("configs serialize")));
                return Ok(EXIT_OK);
            }
            let code = finish(&r.report, cli.out.as_ref())?;
            return Ok(match r.identical {
                Some(true) => {
                    say(&format!("replay: numeric fields identical to {}\n", report.display()));
                    EXIT_OK
                }
                Some(false) => {
                    say(&format!("replay: numeric fields DIFFER from {}\n", report.display()));
                    EXIT_ASSERTION
                }
                None => code,
            });
        }
        (_, Some(c)) => c,
        (_, None) => unreachable!("every other subcommand builds a config"),
    };
    if cli.emit_config {
        config.validate()?;
        say(&format!("{}\n", serde_json::to_string_pretty(&config).expect("configs serialize")));
        return Ok(EXIT_OK);
    }
    let report = qpip_cli::execute(&config)?;
    finish(&report, cli.out.as_ref())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qpipcli: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
