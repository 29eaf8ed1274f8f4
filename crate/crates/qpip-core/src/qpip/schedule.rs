//! Compilation of qudit circuits into rounds of logical Cliffords separated by
//! Toffoli gadgets, and the unencoded gadget itself.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::{CircuitIR, CircuitOp};
use crate::error::{Error, Result};
use crate::pcalg::gates::{Gate, GateTag};
use crate::polycode::LogicalGateTag;
use crate::qcore::field::{mul_mod, neg_mod, pow_mod};
use crate::qcore::linalg::C64;
use crate::qcore::state::measure_wires;
use crate::qcore::{RegisterShape, StateVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalOp {
    pub tag: LogicalGateTag,
    pub blocks: Vec<usize>,
}

impl LogicalOp {
    pub fn new(tag: LogicalGateTag, blocks: &[usize]) -> Self {
        Self {
            tag,
            blocks: blocks.to_vec(),
        }
    }
}

/// One Toffoli round: measure the three data blocks, correct on the magic
/// blocks, then run the Cliffords up to (and including) the next gadget's
/// entangling step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToffoliRound {
    pub measured: [usize; 3],
    pub magic: [usize; 3],
    pub after: Vec<LogicalOp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalSchedule {
    pub q: u32,
    /// Input blocks; magic blocks follow, three per Toffoli.
    pub n: usize,
    pub round0: Vec<LogicalOp>,
    pub rounds: Vec<ToffoliRound>,
    /// Block holding each circuit wire at the end.
    pub wire_blocks: Vec<usize>,
}

impl LogicalSchedule {
    pub fn toffoli_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.n + 3 * self.rounds.len()
    }

    pub fn magic_blocks(&self, t: usize) -> [usize; 3] {
        let b = self.n + 3 * t;
        [b, b + 1, b + 2]
    }

    pub fn output_block(&self) -> usize {
        self.wire_blocks[0]
    }
}

/// The gadget's Cliffords entangling data blocks `d` with magic blocks `mg`.
pub fn entangling_ops(d: [usize; 3], mg: [usize; 3], q: u32) -> Vec<LogicalOp> {
    let mut ops = vec![LogicalOp::new(LogicalGateTag::LSum, &[d[2], mg[2]])];
    for _ in 0..q - 1 {
        ops.push(LogicalOp::new(LogicalGateTag::LSum, &[mg[0], d[0]]));
    }
    for _ in 0..q - 1 {
        ops.push(LogicalOp::new(LogicalGateTag::LSum, &[mg[1], d[1]]));
    }
    ops.push(LogicalOp::new(LogicalGateTag::LFInv, &[d[2]]));
    ops
}

/// Controlled phase to the power `p` as Fourier-conjugated SUMs.
fn cpg_ops(p: u32, a: usize, b: usize) -> Vec<LogicalOp> {
    if p == 0 {
        return Vec::new();
    }
    let mut ops = vec![LogicalOp::new(LogicalGateTag::LFInv, &[b])];
    ops.extend((0..p).map(|_| LogicalOp::new(LogicalGateTag::LSum, &[a, b])));
    ops.push(LogicalOp::new(LogicalGateTag::LF, &[b]));
    ops
}

/// The correction `T (X^x (x) X^y (x) Z^z) T^dagger` on the magic blocks, up to
/// a global phase, as logical gates in time order.
pub fn toffoli_correction(x: u32, y: u32, z: u32, mg: [usize; 3], q: u32) -> Vec<LogicalOp> {
    let mut ops = cpg_ops(neg_mod(z, q), mg[0], mg[1]);
    ops.extend((0..x).map(|_| LogicalOp::new(LogicalGateTag::LSum, &[mg[1], mg[2]])));
    ops.extend((0..y).map(|_| LogicalOp::new(LogicalGateTag::LSum, &[mg[0], mg[2]])));
    let paulis = [
        (x, neg_mod(mul_mod(y, z, q), q)),
        (y, neg_mod(mul_mod(x, z, q), q)),
        (mul_mod(x, y, q), z),
    ];
    for (b, (px, pz)) in mg.iter().zip(paulis) {
        if px != 0 {
            ops.push(LogicalOp::new(LogicalGateTag::LX(px), &[*b]));
        }
        if pz != 0 {
            ops.push(LogicalOp::new(LogicalGateTag::LZ(pz), &[*b]));
        }
    }
    ops
}

fn lower_gate(gate: &Gate, blocks: &[usize], q: u32) -> Result<Vec<LogicalOp>> {
    let p = gate.power;
    let rep = |tag: LogicalGateTag, n: u32| (0..n).map(|_| LogicalOp::new(tag, blocks)).collect::<Vec<_>>();
    Ok(match gate.tag {
        GateTag::X => vec![LogicalOp::new(LogicalGateTag::LX(p % q), blocks)],
        GateTag::Z => vec![LogicalOp::new(LogicalGateTag::LZ(p % q), blocks)],
        GateTag::F => rep(LogicalGateTag::LF, p % 4),
        GateTag::Fr(r) => {
            let mut ops = Vec::new();
            for _ in 0..p % 4 {
                ops.push(LogicalOp::new(LogicalGateTag::LMul(r % q), blocks));
                ops.push(LogicalOp::new(LogicalGateTag::LF, blocks));
            }
            ops
        }
        GateTag::Sum => rep(LogicalGateTag::LSum, p % q),
        GateTag::Mr(r) => vec![LogicalOp::new(LogicalGateTag::LMul(pow_mod(r % q, p as u64, q)), blocks)],
        GateTag::Cpg => cpg_ops(p % q, blocks[0], blocks[1]),
        other => return Err(Error::NotCompilable(format!("{other:?}"))),
    })
}

/// Splits a qudit circuit into `Q_0`, then per Toffoli the measured blocks, the
/// magic blocks and `Q_i`. Each `Q_i` ends with the next gadget's entangling ops.
pub fn compile_to_logical(circuit: &CircuitIR) -> Result<LogicalSchedule> {
    circuit.validate()?;
    let q = circuit
        .wire_dim()
        .ok_or_else(|| Error::NotCompilable("mixed wire dimensions".into()))? as u32;
    if q < 3 {
        return Err(Error::NotCompilable("the polynomial code needs q > m >= 3".into()));
    }
    let n = circuit.num_wires();
    let mut map: Vec<usize> = (0..n).collect();
    let mut round0 = Vec::new();
    let mut rounds: Vec<ToffoliRound> = Vec::new();
    let mut current: Vec<LogicalOp> = Vec::new();
    for op in &circuit.ops {
        let (gate, wires) = match op {
            CircuitOp::Gate { gate, wires } => (gate, wires),
            _ => return Err(Error::NotCompilable("only named gates compile to logical operations".into())),
        };
        let blocks: Vec<usize> = wires.iter().map(|&w| map[w]).collect();
        if gate.tag == GateTag::Toffoli {
            for _ in 0..gate.power % q {
                let d = [map[wires[0]], map[wires[1]], map[wires[2]]];
                let mg = {
                    let b = n + 3 * rounds.len();
                    [b, b + 1, b + 2]
                };
                current.extend(entangling_ops(d, mg, q));
                let ops = core::mem::take(&mut current);
                match rounds.last_mut() {
                    Some(r) => r.after = ops,
                    None => round0 = ops,
                }
                rounds.push(ToffoliRound {
                    measured: d,
                    magic: mg,
                    after: Vec::new(),
                });
                for (w, b) in wires.iter().zip(mg) {
                    map[*w] = b;
                }
            }
        } else {
            current.extend(lower_gate(gate, &blocks, q)?);
        }
    }
    match rounds.last_mut() {
        Some(r) => r.after = current,
        None => round0 = current,
    }
    Ok(LogicalSchedule {
        q,
        n,
        round0,
        rounds,
        wire_blocks: map,
    })
}

/// The unencoded gate a logical operation stands for.
pub fn logical_gate(tag: LogicalGateTag) -> Gate {
    match tag {
        LogicalGateTag::LX(a) => Gate::pow(GateTag::X, a),
        LogicalGateTag::LZ(b) => Gate::pow(GateTag::Z, b),
        LogicalGateTag::LSum => Gate::new(GateTag::Sum),
        LogicalGateTag::LF => Gate::new(GateTag::F),
        LogicalGateTag::LFInv => Gate::pow(GateTag::F, 3),
        LogicalGateTag::LMul(r) => Gate::new(GateTag::Mr(r)),
    }
}

/// Applies logical operations to an unencoded state, one qudit per block.
pub fn apply_unencoded(state: &mut StateVector, ops: &[LogicalOp], q: u32) -> Result<()> {
    for op in ops {
        let g = logical_gate(op.tag);
        if g.power % g.tag.order(q) == 0 {
            continue;
        }
        state.apply(&g.matrix(q)?, &op.blocks)?;
    }
    Ok(())
}

/// `q^{-1} sum_{a,b} |a, b, ab>`.
pub fn magic_state(q: u32) -> StateVector {
    let shape = RegisterShape::qudits(3, q as usize).expect("three qudits fit");
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    let amp = 1.0 / q as f64;
    for a in 0..q {
        for b in 0..q {
            let idx = shape.index(&[a as usize, b as usize, mul_mod(a, b, q) as usize]).expect("digits in range");
            amps[idx] = C64::new(amp, 0.0);
        }
    }
    StateVector::new(shape, amps).expect("normalized")
}

/// Toffoli by teleportation on an unencoded register: entangle `data` with the
/// magic state on `magic`, measure `data`, correct. The result sits on `magic`.
pub fn toffoli_gadget<R: Rng + ?Sized>(
    state: &StateVector,
    data: [usize; 3],
    magic: [usize; 3],
    q: u32,
    rng: &mut R,
) -> Result<([u32; 3], StateVector)> {
    if cfg!(debug_assertions) {
        // the magic wires must hold the magic state, unentangled
        let mut probe = state.clone();
        let (_, reduced) = probe_magic(&mut probe, &magic, q)?;
        if (reduced - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter("magic wires do not hold the magic state".into()));
        }
    }
    let mut s = state.clone();
    apply_unencoded(&mut s, &entangling_ops(data, magic, q), q)?;
    let (digits, mut post) = measure_wires(&s, &data, rng)?;
    let l = [digits[0] as u32, digits[1] as u32, digits[2] as u32];
    apply_unencoded(&mut post, &toffoli_correction(l[0], l[1], l[2], magic, q), q)?;
    Ok((l, post))
}

/// Weight of the magic state on `magic` (1 when it is there as a product factor).
fn probe_magic(state: &mut StateVector, magic: &[usize; 3], q: u32) -> Result<((), f64)> {
    let shape = state.shape().clone();
    let mstate = magic_state(q);
    let rest = shape.complement(magic);
    let rest_shape = shape.select(&rest)?;
    let mut weight = 0.0;
    for r in 0..rest_shape.total_dim() {
        let rd = rest_shape.digits(r);
        let mut overlap = C64::new(0.0, 0.0);
        for (mi, ma) in mstate.amplitudes().iter().enumerate() {
            let md = mstate.shape().digits(mi);
            let mut digits = vec![0; shape.num_wires()];
            for (w, v) in rest.iter().zip(&rd) {
                digits[*w] = *v;
            }
            for (w, v) in magic.iter().zip(&md) {
                digits[*w] = *v;
            }
            overlap += ma.conj() * state.amplitudes()[shape.index(&digits)?];
        }
        weight += overlap.norm_sqr();
    }
    Ok(((), weight))
}

/// Runs the schedule unencoded with the measured blocks projected onto the
/// given outcomes. Every fixed branch yields the circuit's output.
/// Returns the state on all blocks; circuit wire `w` lives on `wire_blocks[w]`.
pub fn run_unencoded_branch(schedule: &LogicalSchedule, input: &StateVector, outcomes: &[[u32; 3]]) -> Result<StateVector> {
    let q = schedule.q;
    if outcomes.len() != schedule.toffoli_count() {
        return Err(Error::InvalidParameter("one outcome triple per Toffoli".into()));
    }
    let mut s = input.clone();
    for _ in 0..schedule.toffoli_count() {
        s = s.tensor(&magic_state(q))?;
    }
    apply_unencoded(&mut s, &schedule.round0, q)?;
    for (round, l) in schedule.rounds.iter().zip(outcomes) {
        let digits: Vec<usize> = l.iter().map(|&v| v as usize).collect();
        let (_, post) = s.project(&round.measured, &digits)?;
        s = post;
        apply_unencoded(&mut s, &toffoli_correction(l[0], l[1], l[2], round.magic, q), q)?;
        apply_unencoded(&mut s, &round.after, q)?;
    }
    Ok(s)
}

/// Reads circuit wires out of a run where the other blocks are in basis states.
pub fn extract_wires(state: &StateVector, schedule: &LogicalSchedule) -> Result<StateVector> {
    let keep = &schedule.wire_blocks;
    let rest = state.shape().complement(keep);
    let probs = state.probabilities(&rest)?;
    let (idx, _) = probs
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    let digits = state.shape().select(&rest)?.digits(idx);
    let sliced = state.slice(&rest, &digits)?;
    // `slice` keeps the remaining wires in ascending order; reorder to circuit order
    let mut sorted = keep.clone();
    sorted.sort_unstable();
    let out_shape = RegisterShape::qudits(keep.len(), schedule.q as usize)?;
    let mut amps = vec![C64::new(0.0, 0.0); out_shape.total_dim()];
    for (i, a) in sliced.amplitudes().iter().enumerate() {
        let d = sliced.shape().digits(i);
        let circuit_digits: Vec<usize> = keep.iter().map(|b| d[sorted.iter().position(|x| x == b).unwrap()]).collect();
        amps[out_shape.index(&circuit_digits)?] = *a;
    }
    StateVector::normalized(out_shape, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::rng::{random_state, seeded};
    use crate::qcore::UnitaryMatrix;

    fn toffoli_only() -> CircuitIR {
        let mut c = CircuitIR::qudits(3, 5);
        c.push(CircuitOp::gate(GateTag::Toffoli, &[0, 1, 2])).unwrap();
        c
    }

    #[test]
    fn clifford_circuit_is_a_single_round() {
        let mut c = CircuitIR::qudits(2, 5);
        c.push(CircuitOp::gate(GateTag::F, &[0])).unwrap();
        c.push(CircuitOp::gate(GateTag::Sum, &[0, 1])).unwrap();
        let s = compile_to_logical(&c).unwrap();
        assert_eq!(s.toffoli_count(), 0);
        assert_eq!(s.round0.len(), 2);
        assert_eq!(s.wire_blocks, vec![0, 1]);
    }

    #[test]
    fn bare_toffoli_is_entangling_then_nothing() {
        let s = compile_to_logical(&toffoli_only()).unwrap();
        assert_eq!(s.toffoli_count(), 1);
        assert_eq!(s.round0, entangling_ops([0, 1, 2], [3, 4, 5], 5));
        assert!(s.rounds[0].after.is_empty());
        assert_eq!(s.wire_blocks, vec![3, 4, 5]);
        let mut bad = CircuitIR::qubits(2);
        bad.push(CircuitOp::gate(GateTag::Cnot, &[0, 1])).unwrap();
        assert!(compile_to_logical(&bad).is_err());
    }

    #[test]
    fn cpg_is_fourier_conjugated_sum() {
        let shape = RegisterShape::qudits(2, 5).unwrap();
        let mut u = UnitaryMatrix::identity(shape.clone());
        for op in cpg_ops(1, 0, 1) {
            u = logical_gate(op.tag).matrix(5).unwrap().embed(&shape, &op.blocks).unwrap().compose(&u).unwrap();
        }
        let cpg = Gate::new(GateTag::Cpg).matrix(5).unwrap();
        assert!(u.matrix().max_abs_diff(cpg.matrix()) < 1e-10);
    }

    #[test]
    fn gadget_maps_basis_input_to_toffoli_output_in_every_branch() {
        let mut rng = seeded(11);
        let data = StateVector::basis(RegisterShape::qudits(3, 5).unwrap(), &[2, 3, 0]).unwrap();
        let input = data.tensor(&magic_state(5)).unwrap();
        let want = StateVector::basis(RegisterShape::qudits(3, 5).unwrap(), &[2, 3, 1]).unwrap();
        for _ in 0..50 {
            let (l, out) = toffoli_gadget(&input, [0, 1, 2], [3, 4, 5], 5, &mut rng).unwrap();
            let digits: Vec<usize> = l.iter().map(|&v| v as usize).collect();
            let on_magic = out.slice(&[0, 1, 2], &digits).unwrap();
            assert!(on_magic.fidelity(&want) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn gadget_matches_direct_toffoli_on_superpositions() {
        let mut rng = seeded(12);
        let shape = RegisterShape::qudits(3, 5).unwrap();
        let toffoli = Gate::new(GateTag::Toffoli).matrix(5).unwrap();
        for _ in 0..5 {
            let psi = random_state(shape.clone(), &mut rng);
            let mut want = psi.clone();
            want.apply(&toffoli, &[0, 1, 2]).unwrap();
            let (l, out) = toffoli_gadget(&psi.tensor(&magic_state(5)).unwrap(), [0, 1, 2], [3, 4, 5], 5, &mut rng).unwrap();
            let digits: Vec<usize> = l.iter().map(|&v| v as usize).collect();
            assert!(out.slice(&[0, 1, 2], &digits).unwrap().fidelity(&want) > 1.0 - 1e-8);
        }
    }

    #[test]
    fn gadget_rejects_missing_magic_state() {
        let zero = StateVector::zero(RegisterShape::qudits(6, 5).unwrap());
        assert!(toffoli_gadget(&zero, [0, 1, 2], [3, 4, 5], 5, &mut seeded(1)).is_err());
    }

    #[test]
    fn recomposition_matches_source_for_every_branch() {
        let mut rng = seeded(13);
        let mut c = CircuitIR::qudits(3, 5);
        c.push(CircuitOp::gate(GateTag::F, &[0])).unwrap();
        c.push(CircuitOp::gate(GateTag::Sum, &[0, 1])).unwrap();
        c.push(CircuitOp::gate(GateTag::Toffoli, &[0, 1, 2])).unwrap();
        c.push(CircuitOp::Gate {
            gate: Gate::new(GateTag::Fr(2)),
            wires: vec![2],
        })
        .unwrap();
        c.push(CircuitOp::gate(GateTag::Cpg, &[2, 0])).unwrap();
        let s = compile_to_logical(&c).unwrap();
        let shape = RegisterShape::qudits(3, 5).unwrap();
        for _ in 0..3 {
            let psi = random_state(shape.clone(), &mut rng);
            let want = {
                let mut w = psi.clone();
                for op in &c.ops {
                    w.apply(&op.matrix(&c.dims).unwrap(), &op.wires()).unwrap();
                }
                w
            };
            let beta = [[rng.gen_range(0..5), rng.gen_range(0..5), rng.gen_range(0..5)]];
            let out = run_unencoded_branch(&s, &psi, &beta).unwrap();
            let got = extract_wires(&out, &s).unwrap();
            assert!(got.fidelity(&want) > 1.0 - 1e-8);
        }
    }
}
