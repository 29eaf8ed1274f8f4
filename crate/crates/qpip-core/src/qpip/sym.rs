//! Symmetric wrapper: the prover announces YES or NO and the verifier runs the
//! protocol for the announced language, catching a cheater by abort.

use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::circuit::{CircuitIR, CircuitOp};
use super::prover::{Claim, Prover};
use super::transcript::{ProtocolVerdict, VerdictRecord};
use crate::error::Result;
use crate::pcalg::gates::GateTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymOutcome {
    One,
    Zero,
    Abort,
}

/// A protocol run for one language on input `x`.
pub type Runner<'a> = dyn FnMut(&[u32], &mut dyn Prover, &mut dyn RngCore) -> Result<VerdictRecord> + 'a;

/// The circuit whose output wire reads 1 exactly when `circuit`'s reads 0.
/// Qubits get a final X; qudits get `a -> 1 - a` as `X F^2`.
pub fn complement_circuit(circuit: &CircuitIR) -> Result<CircuitIR> {
    let mut c = circuit.clone();
    if c.dims[0] != 2 {
        c.push(CircuitOp::gate(GateTag::F, &[0]))?;
        c.push(CircuitOp::gate(GateTag::F, &[0]))?;
    }
    c.push(CircuitOp::gate(GateTag::X, &[0]))?;
    Ok(c)
}

pub fn run_qpip_sym(
    lang: &mut Runner<'_>,
    complement: &mut Runner<'_>,
    x: &[u32],
    prover: &mut dyn Prover,
    rng: &mut dyn RngCore,
) -> Result<SymOutcome> {
    let (record, answer) = match prover.claim() {
        Claim::Yes => (lang(x, prover, rng)?, SymOutcome::One),
        Claim::No => (complement(x, prover, rng)?, SymOutcome::Zero),
    };
    Ok(if record.verdict == ProtocolVerdict::Accept {
        answer
    } else {
        SymOutcome::Abort
    })
}

/// Inputs as bits for the Clifford runner.
pub fn bits(x: &[u32]) -> Vec<usize> {
    x.iter().map(|&b| b as usize).collect()
}
