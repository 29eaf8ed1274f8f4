//! The Clifford-authenticated interactive proof: the verifier decodes the
//! blocks a gate touches, applies the gate, re-encodes and hands them back.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::circuit::CircuitIR;
use super::prover::{AttackContext, HookPoint, Prover, ProverAction};
use super::transcript::{Channel, Direction, ProtocolVerdict, VerdictRecord};
use crate::error::{Error, Result};
use crate::pcalg::clifford::{sample_clifford, CliffordElement, MAX_SAMPLED_QUBITS};
use crate::qcore::state::measure_wires;
use crate::qcore::{RegisterShape, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordQpipConfig {
    /// Auxiliary qubits per block.
    pub e: usize,
    /// Negative control: check auxiliaries every round and keep each block's
    /// key across rounds. Open to slow-rotation attacks.
    pub broken_variant: bool,
}

impl CliffordQpipConfig {
    pub fn new(e: usize) -> Self {
        Self {
            e,
            broken_variant: false,
        }
    }

    pub fn broken(e: usize) -> Self {
        Self { e, broken_variant: true }
    }

    pub fn epsilon(&self) -> f64 {
        libm::pow(2.0, -(self.e as f64))
    }

    pub fn block_len(&self) -> usize {
        1 + self.e
    }
}

/// Applies prover actions to the shared state; returns whether a block was withheld.
pub(crate) fn apply_actions(state: &mut StateVector, actions: &[ProverAction]) -> Result<bool> {
    let mut withheld = false;
    for a in actions {
        match a {
            ProverAction::Unitary { wires, unitary } => state.apply(unitary, wires)?,
            ProverAction::Pauli { wires, pauli } => pauli.apply_to(state, wires)?,
            ProverAction::WithholdBlock => withheld = true,
        }
    }
    Ok(withheld)
}

struct CliffordRun<'a> {
    cfg: CliffordQpipConfig,
    n: usize,
    state: StateVector,
    keys: Vec<CliffordElement>,
    env: Vec<usize>,
    channel: Channel,
    prover: &'a mut dyn Prover,
}

impl CliffordRun<'_> {
    fn block_wires(&self, j: usize) -> Vec<usize> {
        let b = self.cfg.block_len();
        (j * b..(j + 1) * b).collect()
    }

    fn aux_wires(&self, j: usize) -> Vec<usize> {
        self.block_wires(j)[1..].to_vec()
    }

    /// Runs the prover hook and the return of `blocks`; `false` when the
    /// prover sent the wrong number of blocks.
    fn collect(&mut self, round: usize, blocks: &[usize], is_final: bool, rng: &mut dyn RngCore) -> Result<bool> {
        self.channel.set_round(round);
        let held: Vec<Vec<usize>> = (0..self.n).map(|j| self.block_wires(j)).collect();
        let returning: Vec<Vec<usize>> = blocks.iter().map(|&j| self.block_wires(j)).collect();
        let actions = {
            let ctx = AttackContext {
                round,
                point: HookPoint::BeforeReturn,
                is_final,
                returning,
                held,
                env: self.env.clone(),
                wire_dim: 2,
                transcript: self.channel.transcript(),
            };
            self.prover.act(&ctx, rng)?
        };
        let withheld = apply_actions(&mut self.state, &actions)?;
        let mut sent = blocks.to_vec();
        if withheld {
            sent.pop();
        }
        self.channel.send_blocks(Direction::ProverToVerifier, sent)?;
        let got = self.channel.recv_blocks(Direction::ProverToVerifier)?;
        Ok(got.len() == blocks.len())
    }

    fn decode(&mut self, j: usize) -> Result<()> {
        let w = self.block_wires(j);
        self.state.apply(&self.keys[j].matrix().adjoint(), &w)
    }

    fn encode(&mut self, j: usize) -> Result<()> {
        let w = self.block_wires(j);
        self.state.apply(self.keys[j].matrix(), &w)
    }

    /// Measures the auxiliaries of block `j`; `true` when they all read zero.
    fn check_aux(&mut self, j: usize, rng: &mut dyn RngCore) -> Result<bool> {
        let aux = self.aux_wires(j);
        let (digits, post) = measure_wires(&self.state, &aux, rng)?;
        self.state = post;
        Ok(digits.iter().all(|&d| d == 0))
    }

    fn finish(mut self, round: usize, verdict: ProtocolVerdict, output: Option<u32>, invalid: Vec<usize>) -> Result<VerdictRecord> {
        self.channel.set_round(round);
        self.channel.finish(verdict)?;
        Ok(VerdictRecord {
            verdict,
            output: output.map(|v| vec![v]),
            invalid_rounds: invalid,
            transcript: self.channel.into_transcript(),
        })
    }
}

/// Runs the protocol on a qubit circuit with basis input `input`. Wire 0 is
/// the output; the verifier accepts when it reads 1.
pub fn run_clifford_qpip(
    circuit: &CircuitIR,
    input: &[usize],
    cfg: CliffordQpipConfig,
    prover: &mut dyn Prover,
    rng: &mut dyn RngCore,
) -> Result<VerdictRecord> {
    circuit.validate()?;
    if circuit.dims.iter().any(|&d| d != 2) {
        return Err(Error::InvalidParameter("the Clifford protocol runs qubit circuits".into()));
    }
    if cfg.e == 0 || cfg.block_len() > MAX_SAMPLED_QUBITS {
        return Err(Error::UnsupportedCliffordSize(cfg.block_len()));
    }
    let n = circuit.num_wires();
    if input.len() != n || input.iter().any(|&b| b > 1) {
        return Err(Error::InvalidParameter("input must be one bit per wire".into()));
    }
    let b = cfg.block_len();
    let env_dims = prover.env_dims();
    let mut dims = vec![2; n * b];
    let env: Vec<usize> = (n * b..n * b + env_dims.len()).collect();
    dims.extend_from_slice(&env_dims);
    let shape = RegisterShape::new(dims)?;
    let mut digits = vec![0; shape.num_wires()];
    for (j, &bit) in input.iter().enumerate() {
        digits[j * b] = bit;
    }
    let keys = (0..n).map(|_| sample_clifford(b, rng)).collect::<Result<Vec<_>>>()?;
    let mut run = CliffordRun {
        cfg,
        n,
        state: StateVector::basis(shape, &digits)?,
        keys,
        env,
        channel: Channel::new(),
        prover,
    };
    for j in 0..n {
        run.encode(j)?;
    }
    run.channel.send_blocks(Direction::VerifierToProver, (0..n).collect())?;
    run.channel.recv_blocks(Direction::VerifierToProver)?;
    let mut invalid = Vec::new();

    for (i, op) in circuit.ops.iter().enumerate() {
        let round = i + 1;
        let blocks = op.wires();
        if !run.collect(round, &blocks, false, rng)? {
            return run.finish(round, ProtocolVerdict::Abort, None, invalid);
        }
        for &j in &blocks {
            run.decode(j)?;
        }
        if cfg.broken_variant {
            let mut ok = true;
            for &j in &blocks {
                ok &= run.check_aux(j, rng)?;
            }
            if !ok {
                invalid.push(round);
                return run.finish(round, ProtocolVerdict::Abort, None, invalid);
            }
        }
        let data: Vec<usize> = blocks.iter().map(|&j| j * b).collect();
        run.state.apply(&op.matrix(&circuit.dims)?, &data)?;
        for &j in &blocks {
            if !cfg.broken_variant {
                run.keys[j] = sample_clifford(b, rng)?;
            }
            run.encode(j)?;
        }
        run.channel.send_blocks(Direction::VerifierToProver, blocks.clone())?;
        run.channel.recv_blocks(Direction::VerifierToProver)?;
    }

    let last = circuit.ops.len() + 1;
    if !run.collect(last, &[0], true, rng)? {
        return run.finish(last, ProtocolVerdict::Abort, None, invalid);
    }
    run.decode(0)?;
    if !run.check_aux(0, rng)? {
        invalid.push(last);
        return run.finish(last, ProtocolVerdict::Abort, None, invalid);
    }
    let (out, post) = measure_wires(&run.state, &[0], rng)?;
    run.state = post;
    let verdict = if out[0] == 1 {
        ProtocolVerdict::Accept
    } else {
        ProtocolVerdict::Reject
    };
    run.finish(last, verdict, Some(out[0] as u32), invalid)
}

/// Ten-gate two-qubit circuit whose output reads 1 with probability `0.8` on
/// input `01` and `0.2` on input `00`: a biased rotation, a CNOT into the
/// output, and cancelling pairs of random unitaries.
pub fn biased_test_circuit<R: Rng + ?Sized>(rng: &mut R) -> Result<CircuitIR> {
    use super::circuit::CircuitOp;
    use crate::qcore::linalg::{Matrix, C64};
    use crate::qcore::rng::random_unitary;
    use crate::qcore::UnitaryMatrix;
    let theta = 2.0 * libm::asin(libm::sqrt(0.2));
    let (c, s) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
    let ry = Matrix::from_vec(
        2,
        2,
        vec![C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
    )?;
    let one = RegisterShape::qubits(1)?;
    let two = RegisterShape::qubits(2)?;
    let ry = UnitaryMatrix::new(one.clone(), ry)?;
    let cnot = crate::pcalg::gates::Gate::new(crate::pcalg::gates::GateTag::Cnot);
    let mut circ = CircuitIR::qubits(2);
    circ.push(CircuitOp::unitary(&ry, &[0]))?;
    let v = random_unitary(two.clone(), rng);
    circ.push(CircuitOp::unitary(&v, &[0, 1]))?;
    circ.push(CircuitOp::unitary(&v.adjoint(), &[0, 1]))?;
    circ.push(CircuitOp::Gate {
        gate: cnot,
        wires: vec![1, 0],
    })?;
    for _ in 0..3 {
        let w = random_unitary(one.clone(), rng);
        let wire = rng.gen_range(0..2);
        circ.push(CircuitOp::unitary(&w, &[wire]))?;
        circ.push(CircuitOp::unitary(&w.adjoint(), &[wire]))?;
    }
    circ.gamma = 0.2;
    circ.validate()?;
    Ok(circ)
}

/// Forty CNOTs controlled by the `|0>` wire: output 0 with certainty, so every
/// acceptance is wrong. Long enough for slow-rotation attacks to accumulate.
pub fn zeno_test_circuit(gates: usize) -> Result<CircuitIR> {
    use super::circuit::CircuitOp;
    use crate::pcalg::gates::GateTag;
    let mut c = CircuitIR::qubits(2);
    for _ in 0..gates {
        c.push(CircuitOp::gate(GateTag::Cnot, &[1, 0]))?;
    }
    Ok(c)
}
