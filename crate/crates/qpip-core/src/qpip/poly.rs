//! The polynomial-code interactive proof. All blocks are sent up front under
//! one sign key; the prover applies transversal Cliffords, measures blocks for
//! the Toffoli gadgets and finally the output block, and the verifier decodes
//! classically.
//!
//! Two engines run the prover's side: a dense one that holds the physical
//! state, and a logical-frame one that holds the small logical state plus a
//! Pauli frame per block. The frame is exact for honest and Pauli provers.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::circuit::CircuitIR;
use super::keys::{fresh_keys, pauli_key_update};
use super::prover::{AttackContext, HookPoint, Prover, ProverAction};
use super::schedule::{apply_unencoded, compile_to_logical, magic_state, toffoli_correction, LogicalOp, LogicalSchedule};
use super::transcript::{Channel, Direction, ProtocolVerdict, VerdictRecord};
use crate::error::{Error, Result};
use crate::polycode::{decode_measurement, ek_matrix, transversal_steps, Block, CodeParams, PauliKey, SignKey};
use crate::qcore::field::{add_mod, mul_mod, poly_eval};
use crate::qcore::linalg::C64;
use crate::qcore::state::{measure_wires, sample_index};
use crate::qcore::{RegisterShape, StateVector};

/// Decoded output value the verifier accepts on.
pub const ACCEPT_VALUE: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyEngine {
    Dense,
    LogicalFrame,
}

/// The logical input: one digit per input block, then a magic state per Toffoli.
pub fn logical_input(input: &[u32], schedule: &LogicalSchedule) -> Result<StateVector> {
    let q = schedule.q as usize;
    let digits: Vec<usize> = input.iter().map(|&d| d as usize).collect();
    let mut s = StateVector::basis(RegisterShape::qudits(input.len(), q)?, &digits)?;
    for _ in 0..schedule.toffoli_count() {
        s = s.tensor(&magic_state(schedule.q))?;
    }
    Ok(s)
}

trait Backend {
    fn apply(&mut self, op: &LogicalOp) -> Result<()>;
    /// Applies deviations; `true` when a block was withheld.
    fn act(&mut self, actions: &[ProverAction]) -> Result<bool>;
    fn measure(&mut self, block: usize, rng: &mut dyn RngCore) -> Result<Vec<u32>>;
    fn env_wires(&self) -> Vec<usize>;
}

struct DenseBackend {
    p: CodeParams,
    sign: SignKey,
    blocks: usize,
    state: StateVector,
}

impl DenseBackend {
    fn new(logical: &StateVector, sign: &SignKey, keys: &[PauliKey], env_dims: &[usize], p: &CodeParams) -> Result<Self> {
        let m = p.m();
        let q = p.q() as usize;
        let nb = logical.shape().num_wires();
        let mut dims = vec![q; nb * m];
        dims.extend_from_slice(env_dims);
        let shape = RegisterShape::new(dims)?;
        // logical qudit j on wire j*m, auxiliaries zero, environment zero
        let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
        let mut digits = vec![0; shape.num_wires()];
        for (idx, a) in logical.amplitudes().iter().enumerate() {
            for (j, d) in logical.shape().digits(idx).into_iter().enumerate() {
                digits[j * m] = d;
            }
            amps[shape.index(&digits)?] = *a;
        }
        let mut state = StateVector::new(shape, amps)?;
        let ek = ek_matrix(sign, p)?;
        for (j, key) in keys.iter().enumerate() {
            let w: Vec<usize> = (j * m..(j + 1) * m).collect();
            state.apply(&ek, &w)?;
            key.to_pauli(p.q()).apply_to(&mut state, &w)?;
        }
        Ok(Self {
            p: p.clone(),
            sign: sign.clone(),
            blocks: nb,
            state,
        })
    }
}

impl Backend for DenseBackend {
    fn apply(&mut self, op: &LogicalOp) -> Result<()> {
        if op.tag.is_pauli() {
            return Ok(());
        }
        let blocks: Vec<Block> = op.blocks.iter().map(|&b| Block::new(b * self.p.m(), self.sign.clone())).collect();
        for (g, wires) in transversal_steps(op.tag, &blocks, &self.p)? {
            self.state.apply(&g.matrix(self.p.q())?, &wires)?;
        }
        Ok(())
    }

    fn act(&mut self, actions: &[ProverAction]) -> Result<bool> {
        super::clifford::apply_actions(&mut self.state, actions)
    }

    fn measure(&mut self, block: usize, rng: &mut dyn RngCore) -> Result<Vec<u32>> {
        let m = self.p.m();
        let w: Vec<usize> = (block * m..(block + 1) * m).collect();
        let (digits, post) = measure_wires(&self.state, &w, rng)?;
        self.state = post;
        Ok(digits.into_iter().map(|d| d as u32).collect())
    }

    fn env_wires(&self) -> Vec<usize> {
        (self.blocks * self.p.m()..self.state.shape().num_wires()).collect()
    }
}

struct FrameBackend {
    p: CodeParams,
    sign: SignKey,
    logical: StateVector,
    frame: Vec<PauliKey>,
}

impl Backend for FrameBackend {
    fn apply(&mut self, op: &LogicalOp) -> Result<()> {
        apply_unencoded(&mut self.logical, core::slice::from_ref(op), self.p.q())?;
        pauli_key_update(&mut self.frame, &self.sign, op.tag, &op.blocks, &self.p)
    }

    fn act(&mut self, actions: &[ProverAction]) -> Result<bool> {
        let m = self.p.m();
        let q = self.p.q();
        let mut withheld = false;
        for a in actions {
            match a {
                ProverAction::Pauli { wires, pauli } => {
                    for (i, &w) in wires.iter().enumerate() {
                        // environment wires are invisible to the verifier
                        if let Some(f) = self.frame.get_mut(w / m) {
                            f.x[w % m] = add_mod(f.x[w % m], pauli.x()[i], q);
                            f.z[w % m] = add_mod(f.z[w % m], pauli.z()[i], q);
                        }
                    }
                }
                ProverAction::WithholdBlock => withheld = true,
                ProverAction::Unitary { .. } => {
                    return Err(Error::PolicyUnsupported("the logical-frame engine tracks Pauli deviations only".into()))
                }
            }
        }
        Ok(withheld)
    }

    fn measure(&mut self, block: usize, rng: &mut dyn RngCore) -> Result<Vec<u32>> {
        let q = self.p.q();
        let probs = self.logical.probabilities(&[block])?;
        let a = sample_index(&probs, rng);
        let (_, post) = self.logical.project(&[block], &[a])?;
        self.logical = post;
        let mut f = vec![a as u32];
        f.extend((0..self.p.d()).map(|_| rng.gen_range(0..q)));
        let kf = self.sign.as_field(q);
        Ok((0..self.p.m())
            .map(|i| add_mod(mul_mod(kf[i], poly_eval(&f, self.p.alphas()[i], q), q), self.frame[block].x[i], q))
            .collect())
    }

    fn env_wires(&self) -> Vec<usize> {
        Vec::new()
    }
}

/// Runs the protocol on a qudit circuit. The verifier accepts when the decoded
/// output equals [`ACCEPT_VALUE`] and no measurement was invalid.
pub fn run_poly_qpip(
    circuit: &CircuitIR,
    input: &[u32],
    p: &CodeParams,
    prover: &mut dyn Prover,
    rng: &mut dyn RngCore,
    engine: PolyEngine,
) -> Result<VerdictRecord> {
    let schedule = compile_to_logical(circuit)?;
    if schedule.q != p.q() {
        return Err(Error::InvalidParameter("circuit wire dimension differs from the code field".into()));
    }
    if input.len() != schedule.n || input.iter().any(|&d| d >= p.q()) {
        return Err(Error::InvalidParameter("input must be one field digit per wire".into()));
    }
    let nb = schedule.num_blocks();
    let m = p.m();
    let sign = SignKey::random(m, rng);
    let mut keys = fresh_keys(nb, p, rng);
    let logical = logical_input(input, &schedule)?;
    let mut backend: alloc::boxed::Box<dyn Backend> = match engine {
        PolyEngine::Dense => alloc::boxed::Box::new(DenseBackend::new(&logical, &sign, &keys, &prover.env_dims(), p)?),
        PolyEngine::LogicalFrame => alloc::boxed::Box::new(FrameBackend {
            p: p.clone(),
            sign: sign.clone(),
            logical,
            frame: keys.clone(),
        }),
    };
    let mut ch = Channel::new();
    let mut held: Vec<usize> = (0..nb).collect();
    let mut invalid = Vec::new();
    ch.send_blocks(Direction::VerifierToProver, held.clone())?;
    ch.recv_blocks(Direction::VerifierToProver)?;

    let run_ops = |ops: &[LogicalOp], backend: &mut dyn Backend, keys: &mut [PauliKey]| -> Result<()> {
        for op in ops {
            backend.apply(op)?;
            pauli_key_update(keys, &sign, op.tag, &op.blocks, p)?;
        }
        Ok(())
    };
    run_ops(&schedule.round0, backend.as_mut(), &mut keys)?;

    let finish = |mut ch: Channel, round: usize, verdict, output: Option<u32>, invalid: Vec<usize>| -> Result<VerdictRecord> {
        ch.set_round(round);
        ch.finish(verdict)?;
        Ok(VerdictRecord {
            verdict,
            output: output.map(|v| vec![v]),
            invalid_rounds: invalid,
            transcript: ch.into_transcript(),
        })
    };

    let l = schedule.toffoli_count();
    for round in 1..=l + 1 {
        let is_final = round == l + 1;
        let measured: Vec<usize> = if is_final {
            vec![schedule.output_block()]
        } else {
            schedule.rounds[round - 1].measured.to_vec()
        };
        ch.set_round(round);
        let actions = {
            let ctx = AttackContext {
                round,
                point: HookPoint::BeforeMeasurement,
                is_final,
                returning: measured.iter().map(|&b| (b * m..(b + 1) * m).collect()).collect(),
                held: held.iter().map(|&b| (b * m..(b + 1) * m).collect()).collect(),
                env: backend.env_wires(),
                wire_dim: p.q() as usize,
                transcript: ch.transcript(),
            };
            prover.act(&ctx, rng)?
        };
        let withheld = backend.act(&actions)?;
        let mut raw = Vec::with_capacity(measured.len() * m);
        for &b in &measured {
            raw.extend(backend.measure(b, rng)?);
        }
        held.retain(|b| !measured.contains(b));
        if withheld {
            raw.truncate(raw.len() - m);
        }
        ch.send_digits(Direction::ProverToVerifier, &raw)?;
        let got = ch.recv_digits(Direction::ProverToVerifier)?;
        if got.len() != measured.len() * m {
            return finish(ch, round, ProtocolVerdict::Abort, None, invalid);
        }
        let mut values = Vec::with_capacity(measured.len());
        let mut ok = true;
        for (t, &b) in measured.iter().enumerate() {
            let dec = decode_measurement(&got[t * m..(t + 1) * m], &sign, &keys[b], p)?;
            ok &= dec.valid;
            values.push(dec.value);
        }
        if !ok {
            invalid.push(round);
        }
        if is_final {
            if !invalid.is_empty() {
                return finish(ch, round, ProtocolVerdict::Abort, None, invalid);
            }
            let verdict = if values[0] == ACCEPT_VALUE {
                ProtocolVerdict::Accept
            } else {
                ProtocolVerdict::Reject
            };
            return finish(ch, round, verdict, Some(values[0]), invalid);
        }
        ch.send_digits(Direction::VerifierToProver, &values)?;
        let g = ch.recv_digits(Direction::VerifierToProver)?;
        let tr = &schedule.rounds[round - 1];
        run_ops(&toffoli_correction(g[0], g[1], g[2], tr.magic, p.q()), backend.as_mut(), &mut keys)?;
        run_ops(&tr.after, backend.as_mut(), &mut keys)?;
    }
    unreachable!("the final round returns")
}
