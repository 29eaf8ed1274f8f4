//! Gate-list circuits, their dense reference semantics and the universal circuit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcalg::gates::{Gate, GateTag};
use crate::qcore::linalg::{Matrix, C64};
use crate::qcore::{RegisterShape, StateVector, UnitaryMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CircuitOp {
    Gate { gate: Gate, wires: Vec<usize> },
    /// A dense unitary on the listed wires, row-major `[re, im]` entries.
    Unitary { wires: Vec<usize>, entries: Vec<[f64; 2]> },
    /// `gate` on `wires` when the control wire reads 1, identity otherwise.
    Controlled { control: usize, gate: Gate, wires: Vec<usize> },
}

impl CircuitOp {
    pub fn gate(tag: GateTag, wires: &[usize]) -> Self {
        CircuitOp::Gate {
            gate: Gate::new(tag),
            wires: wires.to_vec(),
        }
    }

    pub fn unitary(u: &UnitaryMatrix, wires: &[usize]) -> Self {
        CircuitOp::Unitary {
            wires: wires.to_vec(),
            entries: u.matrix().data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        match self {
            CircuitOp::Gate { wires, .. } | CircuitOp::Unitary { wires, .. } => wires.clone(),
            CircuitOp::Controlled { control, wires, .. } => {
                let mut w = vec![*control];
                w.extend_from_slice(wires);
                w
            }
        }
    }

    pub fn is_toffoli(&self) -> bool {
        matches!(self, CircuitOp::Gate { gate, .. } if gate.tag == GateTag::Toffoli && gate.power != 0)
    }

    /// Dense matrix on the op's wires (control first for controlled ops).
    pub fn matrix(&self, dims: &[usize]) -> Result<UnitaryMatrix> {
        let wires = self.wires();
        let shape = RegisterShape::new(wires.iter().map(|&w| dims[w]).collect())?;
        match self {
            CircuitOp::Gate { gate, .. } => {
                let q = dims[wires[0]] as u32;
                let u = gate.matrix(q)?;
                if u.shape() != &shape {
                    return Err(Error::ShapeMismatch(format!("{:?} on wires of dims {:?}", gate.tag, shape.dims())));
                }
                Ok(u)
            }
            CircuitOp::Unitary { entries, .. } => {
                let d = shape.total_dim();
                if entries.len() != d * d {
                    return Err(Error::ShapeMismatch("unitary entries do not match the wires".into()));
                }
                let m = Matrix::from_vec(d, d, entries.iter().map(|e| C64::new(e[0], e[1])).collect())?;
                UnitaryMatrix::new(shape, m)
            }
            CircuitOp::Controlled { gate, .. } => {
                let dc = shape.dims()[0];
                let q = dims[wires[1]] as u32;
                let inner = gate.matrix(q)?;
                let di = inner.dim();
                if di * dc != shape.total_dim() {
                    return Err(Error::ShapeMismatch("controlled gate does not match target dims".into()));
                }
                let m = Matrix::from_fn(dc * di, dc * di, |r, c| {
                    let (cr, ir) = (r / di, r % di);
                    let (cc, ic) = (c / di, c % di);
                    if cr != cc {
                        C64::new(0.0, 0.0)
                    } else if cr == 1 {
                        inner.matrix()[(ir, ic)]
                    } else if ir == ic {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                UnitaryMatrix::new(shape, m)
            }
        }
    }
}

/// A circuit on wires of the given dimensions; wire 0 carries the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub dims: Vec<usize>,
    pub ops: Vec<CircuitOp>,
    /// Declared error bound: YES instances output 1 with probability at least
    /// `1 - gamma`, NO instances at most `gamma`.
    pub gamma: f64,
}

impl CircuitIR {
    pub fn new(dims: Vec<usize>, ops: Vec<CircuitOp>, gamma: f64) -> Result<Self> {
        let c = Self { dims, ops, gamma };
        c.validate()?;
        Ok(c)
    }

    pub fn qubits(n: usize) -> Self {
        Self {
            dims: vec![2; n],
            ops: Vec::new(),
            gamma: 0.0,
        }
    }

    pub fn qudits(n: usize, q: u32) -> Self {
        Self {
            dims: vec![q as usize; n],
            ops: Vec::new(),
            gamma: 0.0,
        }
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<&mut Self> {
        self.check_op(&op)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn num_wires(&self) -> usize {
        self.dims.len()
    }

    pub fn shape(&self) -> Result<RegisterShape> {
        RegisterShape::new(self.dims.clone())
    }

    /// Common wire dimension, if uniform.
    pub fn wire_dim(&self) -> Option<usize> {
        let d = *self.dims.first()?;
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    pub fn toffoli_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_toffoli()).count()
    }

    fn check_op(&self, op: &CircuitOp) -> Result<()> {
        let wires = op.wires();
        for (i, &w) in wires.iter().enumerate() {
            if w >= self.dims.len() {
                return Err(Error::WireOutOfRange(w));
            }
            if wires[..i].contains(&w) {
                return Err(Error::RepeatedWire(w));
            }
        }
        op.matrix(&self.dims).map(|_| ())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter("circuit needs at least one wire".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter("gamma must lie in [0, 1]".into()));
        }
        self.shape()?;
        self.ops.iter().try_for_each(|op| self.check_op(op))
    }

    /// Runs the circuit on a basis input.
    pub fn simulate(&self, input: &[usize]) -> Result<StateVector> {
        let mut s = StateVector::basis(self.shape()?, input)?;
        for op in &self.ops {
            s.apply(&op.matrix(&self.dims)?, &op.wires())?;
        }
        Ok(s)
    }

    /// The full unitary (small circuits only).
    pub fn unitary(&self) -> Result<UnitaryMatrix> {
        let shape = self.shape()?;
        let mut u = UnitaryMatrix::identity(shape.clone());
        for op in &self.ops {
            u = op.matrix(&self.dims)?.embed(&shape, &op.wires())?.compose(&u)?;
        }
        Ok(u)
    }

    /// Probability that the output wire reads 1.
    pub fn accept_probability(&self, input: &[usize]) -> Result<f64> {
        let probs = self.simulate(input)?.probabilities(&[0])?;
        Ok(probs.get(1).copied().unwrap_or(0.0))
    }

    /// Most likely outcome of measuring every wire, with its probability.
    pub fn reference_output(&self, input: &[usize]) -> Result<(Vec<usize>, f64)> {
        let s = self.simulate(input)?;
        let (idx, p) = s
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        Ok((s.shape().digits(idx), p))
    }

    /// The Q-CIRCUIT promise-gap condition `1 - 2 gamma > 0`. Advisory only.
    pub fn promise_gap_warning(&self) -> Option<alloc::string::String> {
        (1.0 - 2.0 * self.gamma <= 0.0).then(|| format!("gamma = {} leaves no promise gap", self.gamma))
    }
}

/// One gate of a description fed to the universal circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversalGate {
    /// Fourier transform on one data wire.
    F(usize),
    /// SUM from the first data wire into the second.
    Sum(usize, usize),
}

/// Gates available in every layer, in control-wire order.
pub fn universal_layer(n: usize) -> Vec<UniversalGate> {
    let mut layer: Vec<UniversalGate> = (0..n).map(UniversalGate::F).collect();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                layer.push(UniversalGate::Sum(a, b));
            }
        }
    }
    layer
}

/// Control bits `c(U)`: one per (layer, gate option), set for the chosen gate.
pub fn canonical_description(desc: &[UniversalGate], n: usize, max_gates: usize) -> Result<Vec<usize>> {
    if desc.len() > max_gates {
        return Err(Error::InvalidParameter(format!("{} gates exceed the {max_gates}-layer circuit", desc.len())));
    }
    let layer = universal_layer(n);
    let mut bits = vec![0usize; max_gates * layer.len()];
    for (i, g) in desc.iter().enumerate() {
        let pos = layer
            .iter()
            .position(|x| x == g)
            .ok_or_else(|| Error::InvalidParameter(format!("{g:?} is not in the universal gate set for n = {n}")))?;
        bits[i * layer.len() + pos] = 1;
    }
    Ok(bits)
}

/// The fixed layered circuit on `n` data qudits followed by qubit control wires.
/// Fed `input (x) c(U)` it applies `U` to the input. The description only
/// validates that `desc` fits; the gate list never depends on it.
pub fn build_universal_circuit(desc: &[UniversalGate], n: usize, max_gates: usize, q: u32) -> Result<CircuitIR> {
    canonical_description(desc, n, max_gates)?;
    let layer = universal_layer(n);
    let mut dims = vec![q as usize; n];
    dims.extend(core::iter::repeat(2).take(max_gates * layer.len()));
    let mut c = CircuitIR {
        dims,
        ops: Vec::new(),
        gamma: 0.0,
    };
    for l in 0..max_gates {
        for (j, g) in layer.iter().enumerate() {
            let control = n + l * layer.len() + j;
            let (gate, wires) = match *g {
                UniversalGate::F(w) => (Gate::new(GateTag::F), vec![w]),
                UniversalGate::Sum(a, b) => (Gate::new(GateTag::Sum), vec![a, b]),
            };
            c.push(CircuitOp::Controlled { control, gate, wires })?;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_circuit_applies_the_described_gate() {
        let desc = [UniversalGate::Sum(0, 1)];
        let uc = build_universal_circuit(&desc, 2, 2, 5).unwrap();
        let bits = canonical_description(&desc, 2, 2).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let mut input = vec![a, b];
                input.extend_from_slice(&bits);
                let out = uc.simulate(&input).unwrap();
                let mut want = vec![a, (a + b) % 5];
                want.extend_from_slice(&bits);
                assert!((out.amplitude(&want).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_description_is_identity_and_structure_is_fixed() {
        let uc = build_universal_circuit(&[], 2, 2, 5).unwrap();
        let bits = canonical_description(&[], 2, 2).unwrap();
        let mut input = vec![3, 1];
        input.extend_from_slice(&bits);
        assert!((uc.simulate(&input).unwrap().amplitude(&input).unwrap().norm() - 1.0).abs() < 1e-12);
        let other = build_universal_circuit(&[UniversalGate::F(1), UniversalGate::Sum(1, 0)], 2, 2, 5).unwrap();
        assert_eq!(uc.ops, other.ops);
        assert!(canonical_description(&[UniversalGate::F(0); 3], 2, 2).is_err());
    }

    #[test]
    fn two_gate_description_matches_direct_application() {
        let desc = [UniversalGate::F(0), UniversalGate::Sum(0, 1)];
        let uc = build_universal_circuit(&desc, 2, 2, 5).unwrap();
        let bits = canonical_description(&desc, 2, 2).unwrap();
        let mut direct = CircuitIR::qudits(2, 5);
        direct.push(CircuitOp::gate(GateTag::F, &[0])).unwrap();
        direct.push(CircuitOp::gate(GateTag::Sum, &[0, 1])).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let mut input = vec![a, b];
                input.extend_from_slice(&bits);
                let out = uc.simulate(&input).unwrap();
                let reference = direct.simulate(&[a, b]).unwrap();
                for (idx, amp) in reference.amplitudes().iter().enumerate() {
                    let mut digits = reference.shape().digits(idx);
                    digits.extend_from_slice(&bits);
                    assert!((out.amplitude(&digits).unwrap() - amp).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_wires() {
        let mut c = CircuitIR::qubits(2);
        assert_eq!(c.push(CircuitOp::gate(GateTag::Cnot, &[0, 0])).unwrap_err(), Error::RepeatedWire(0));
        assert_eq!(c.push(CircuitOp::gate(GateTag::H, &[2])).unwrap_err(), Error::WireOutOfRange(2));
        let mut d = CircuitIR::qudits(1, 5);
        assert!(d.push(CircuitOp::gate(GateTag::Sum, &[0])).is_err());
    }
}
