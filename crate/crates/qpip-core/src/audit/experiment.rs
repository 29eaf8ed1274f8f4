//! Completeness and soundness estimation by repeated protocol runs.

use alloc::string::String;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::policy::AdversaryPolicy;
use super::stats::{binomial_sigma, wilson_interval, Interval, Z95};
use crate::error::{Error, Result};
use crate::polycode::CodeParams;
use crate::qcore::rng::{fork, seeded};
use crate::qpip::circuit::CircuitIR;
use crate::qpip::clifford::{run_clifford_qpip, CliffordQpipConfig};
use crate::qpip::poly::{run_poly_qpip, PolyEngine};
use crate::qpip::prover::{Claim, Prover};
use crate::qpip::sym::bits;
use crate::qpip::transcript::VerdictRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ProtocolConfig {
    Clifford {
        e: usize,
        #[serde(default)]
        broken_variant: bool,
    },
    Poly {
        params: CodeParams,
        engine: PolyEngine,
    },
}

impl ProtocolConfig {
    /// The soundness parameter the protocol is audited against: `2^-e`, or
    /// `1/2^{m-1}` for the polynomial code.
    pub fn epsilon(&self) -> f64 {
        match self {
            ProtocolConfig::Clifford { e, .. } => libm::pow(2.0, -(*e as f64)),
            ProtocolConfig::Poly { params, .. } => libm::pow(2.0, -((params.m() - 1) as f64)),
        }
    }

    /// `2^-d` for the polynomial code: the bound that survives Paulis
    /// correlated with more than two sign keys.
    pub fn corrected_epsilon(&self) -> Option<f64> {
        match self {
            ProtocolConfig::Clifford { .. } => None,
            ProtocolConfig::Poly { params, .. } => Some(libm::pow(2.0, -(params.d() as f64))),
        }
    }

    pub fn is_broken_variant(&self) -> bool {
        matches!(self, ProtocolConfig::Clifford { broken_variant: true, .. })
    }

    pub fn run(&self, circuit: &CircuitIR, input: &[u32], prover: &mut dyn Prover, rng: &mut dyn RngCore) -> Result<VerdictRecord> {
        match self {
            ProtocolConfig::Clifford { e, broken_variant } => {
                let cfg = if *broken_variant {
                    CliffordQpipConfig::broken(*e)
                } else {
                    CliffordQpipConfig::new(*e)
                };
                run_clifford_qpip(circuit, &bits(input), cfg, prover, rng)
            }
            ProtocolConfig::Poly { params, engine } => run_poly_qpip(circuit, input, params, prover, rng, *engine),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub protocol: ProtocolConfig,
    pub policy: AdversaryPolicy,
    pub input: Vec<u32>,
    pub reference_output: u32,
    pub seed: u64,
    pub trials: usize,
    pub accepts: usize,
    pub rejects: usize,
    pub aborts: usize,
    pub wrong_accepts: usize,
    pub accept_rate: f64,
    pub wrong_accept_rate: f64,
    pub abort_rate: f64,
    pub accept_interval: Interval,
    pub wrong_accept_interval: Interval,
    pub gamma: f64,
    pub epsilon: f64,
    pub corrected_epsilon: Option<f64>,
    /// `gamma + epsilon`.
    pub bound: f64,
    /// Binomial standard deviation of a rate equal to `bound`.
    pub sigma: f64,
    /// `wrong_accept_rate <= bound + 3 sigma`.
    pub within_budget: bool,
    /// The protocol was the broken per-round-check variant, run to be beaten.
    pub negative_control: bool,
    /// Monte-Carlo estimates are evidence, not proof.
    pub statistical: bool,
}

impl ExperimentReport {
    /// Honest accept rate within three standard deviations of `1 - gamma` (or above it).
    pub fn completeness_holds(&self) -> bool {
        let target = 1.0 - self.gamma;
        self.accept_rate >= target - 3.0 * binomial_sigma(target, self.trials) - 1e-12
    }

    pub fn summary(&self) -> String {
        alloc::format!(
            "{}: accept {:.4} wrong-accept {:.4} abort {:.4} (bound {:.4}, {} trials)",
            self.policy.name(),
            self.accept_rate,
            self.wrong_accept_rate,
            self.abort_rate,
            self.bound,
            self.trials
        )
    }
}

/// Runs `trials` independent protocol executions, each on a generator forked
/// from `seed`. A wrong accept is an accept whose output differs from the
/// circuit's most likely output.
pub fn run_experiment(
    config: &ProtocolConfig,
    circuit: &CircuitIR,
    input: &[u32],
    policy: &AdversaryPolicy,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let idx: Vec<usize> = input.iter().map(|&d| d as usize).collect();
    let reference = circuit.reference_output(&idx)?.0[0] as u32;
    let mut master = seeded(seed);
    let (mut accepts, mut rejects, mut aborts, mut wrong) = (0, 0, 0, 0);
    for _ in 0..trials {
        let mut rng = fork(&mut master);
        let mut prover = policy.prover(Claim::Yes)?;
        let rec = config.run(circuit, input, &mut prover, &mut rng)?;
        if rec.accepted() {
            accepts += 1;
            if rec.output.as_ref().map(|o| o[0]) != Some(reference) {
                wrong += 1;
            }
        } else if rec.aborted() {
            aborts += 1;
        } else {
            rejects += 1;
        }
    }
    let n = trials as f64;
    let bound = circuit.gamma + config.epsilon();
    let sigma = binomial_sigma(bound, trials);
    let wrong_accept_rate = wrong as f64 / n;
    Ok(ExperimentReport {
        protocol: config.clone(),
        policy: policy.clone(),
        input: input.to_vec(),
        reference_output: reference,
        seed,
        trials,
        accepts,
        rejects,
        aborts,
        wrong_accepts: wrong,
        accept_rate: accepts as f64 / n,
        wrong_accept_rate,
        abort_rate: aborts as f64 / n,
        accept_interval: wilson_interval(accepts, trials, Z95),
        wrong_accept_interval: wilson_interval(wrong, trials, Z95),
        gamma: circuit.gamma,
        epsilon: config.epsilon(),
        corrected_epsilon: config.corrected_epsilon(),
        bound,
        sigma,
        within_budget: wrong_accept_rate <= bound + 3.0 * sigma,
        negative_control: config.is_broken_variant(),
        statistical: true,
    })
}

pub fn estimate_completeness(
    config: &ProtocolConfig,
    circuit: &CircuitIR,
    input: &[u32],
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    run_experiment(config, circuit, input, &AdversaryPolicy::Honest, trials, seed)
}

pub fn estimate_soundness(
    config: &ProtocolConfig,
    circuit: &CircuitIR,
    input: &[u32],
    policy: &AdversaryPolicy,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    run_experiment(config, circuit, input, policy, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::policy::RoundSel;
    use crate::pcalg::gates::GateTag;
    use crate::qpip::circuit::CircuitOp;

    fn parity() -> CircuitIR {
        let mut c = CircuitIR::qudits(1, 5);
        c.push(CircuitOp::gate(GateTag::F, &[0])).unwrap();
        c.push(CircuitOp::gate(GateTag::F, &[0])).unwrap();
        c
    }

    #[test]
    fn deterministic_honest_runs_always_accept() {
        let cfg = ProtocolConfig::Poly {
            params: CodeParams::default_instance(),
            engine: PolyEngine::Dense,
        };
        let r = estimate_completeness(&cfg, &parity(), &[4], 50, 1).unwrap();
        assert_eq!(r.accepts, 50);
        assert!(r.completeness_holds());
        assert_eq!(r.wrong_accepts, 0);
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = ProtocolConfig::Poly {
            params: CodeParams::default_instance(),
            engine: PolyEngine::LogicalFrame,
        };
        let pol = AdversaryPolicy::FixedPauli {
            when: RoundSel::Final,
            x: alloc::vec![1, 2, 3],
            z: alloc::vec![0, 0, 0],
        };
        let a = estimate_soundness(&cfg, &parity(), &[0], &pol, 200, 9).unwrap();
        let b = estimate_soundness(&cfg, &parity(), &[0], &pol, 200, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.within_budget);
        assert_eq!(a.accepts + a.rejects + a.aborts, a.trials);
    }
}
