//! The gate alphabet, dense gate matrices and symbolic Pauli conjugation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::pauli::SymbolicPauli;
use crate::error::{Error, Result};
use crate::qcore::field::{add_mod, inv_mod, is_prime, mul_mod, neg_mod, sub_mod};
use crate::qcore::linalg::{root_of_unity, Matrix, C64, ONE};
use crate::qcore::{RegisterShape, UnitaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateTag {
    /// Fourier transform, `|a> -> q^{-1/2} sum_b w^{ab} |b>`.
    F,
    /// Scaled Fourier transform with `w^{rab}`.
    Fr(u32),
    /// `|a, b> -> |a, a + b>`.
    Sum,
    /// `|a, b, c> -> |a, b, c + ab>`.
    Toffoli,
    /// `|a> -> |ra>` for nonzero `r`.
    Mr(u32),
    /// Controlled phase `|a, b> -> w^{ab} |a, b>`.
    Cpg,
    X,
    Z,
    /// Qubit Hadamard.
    H,
    /// Qubit phase gate `diag(1, i)`.
    K,
    /// Qubit controlled-not.
    Cnot,
}

impl GateTag {
    pub fn arity(&self) -> usize {
        match self {
            GateTag::Sum | GateTag::Cpg | GateTag::Cnot => 2,
            GateTag::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, GateTag::Toffoli)
    }

    pub fn qubit_only(&self) -> bool {
        matches!(self, GateTag::H | GateTag::K | GateTag::Cnot)
    }

    /// Multiplicative order bound used to express inverses as powers.
    pub fn order(&self, q: u32) -> u32 {
        match self {
            GateTag::F | GateTag::Fr(_) => 4,
            GateTag::Mr(r) => {
                let mut k = 1;
                let mut acc = r % q;
                while acc != 1 && k < q {
                    acc = mul_mod(acc, *r, q);
                    k += 1;
                }
                k
            }
            GateTag::K => 4,
            GateTag::H | GateTag::Cnot => 2,
            _ => q,
        }
    }
}

/// A gate raised to a power; inverses are written as `order - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub tag: GateTag,
    pub power: u32,
}

impl Gate {
    pub fn new(tag: GateTag) -> Self {
        Self { tag, power: 1 }
    }

    pub fn pow(tag: GateTag, power: u32) -> Self {
        Self { tag, power }
    }

    pub fn inverse(&self, q: u32) -> Self {
        let ord = self.tag.order(q);
        Self {
            tag: self.tag,
            power: (ord - self.power % ord) % ord,
        }
    }

    pub fn matrix(&self, q: u32) -> Result<UnitaryMatrix> {
        Ok(gate_matrix(&self.tag, q)?.pow(self.power))
    }

    pub fn conjugate(&self, p: &SymbolicPauli) -> Result<SymbolicPauli> {
        let mut out = p.clone();
        for _ in 0..self.power {
            out = conjugate_symbolic(&self.tag, &out)?;
        }
        Ok(out)
    }
}

impl From<GateTag> for Gate {
    fn from(tag: GateTag) -> Self {
        Gate::new(tag)
    }
}

fn check_field(tag: &GateTag, q: u32) -> Result<()> {
    if tag.qubit_only() && q != 2 {
        return Err(Error::UnsupportedGate(format!("{tag:?} acts on qubits only")));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    match tag {
        GateTag::Fr(r) | GateTag::Mr(r) if r % q == 0 => {
            Err(Error::UnsupportedGate(format!("{tag:?} needs a nonzero parameter")))
        }
        _ => Ok(()),
    }
}

/// Dense matrix of a gate on `arity` wires of dimension `q`.
pub fn gate_matrix(tag: &GateTag, q: u32) -> Result<UnitaryMatrix> {
    check_field(tag, q)?;
    let qs = q as usize;
    let shape = RegisterShape::new(vec![qs; tag.arity()])?;
    let d = shape.total_dim();
    let mut m = Matrix::zeros(d, d);
    let inv_sqrt = 1.0 / libm::sqrt(q as f64);
    match *tag {
        GateTag::F | GateTag::Fr(_) | GateTag::H => {
            let r = if let GateTag::Fr(r) = *tag { r % q } else { 1 };
            for a in 0..q {
                for b in 0..q {
                    let ph = root_of_unity(mul_mod(r, mul_mod(a, b, q), q) as u64, q);
                    m[(b as usize, a as usize)] = ph * inv_sqrt;
                }
            }
        }
        GateTag::Sum | GateTag::Cnot => {
            for a in 0..qs {
                for b in 0..qs {
                    m[(a * qs + (a + b) % qs, a * qs + b)] = ONE;
                }
            }
        }
        GateTag::Toffoli => {
            for a in 0..qs {
                for b in 0..qs {
                    for c in 0..qs {
                        let t = (c + a * b) % qs;
                        m[(a * qs * qs + b * qs + t, a * qs * qs + b * qs + c)] = ONE;
                    }
                }
            }
        }
        GateTag::Mr(r) => {
            for a in 0..q {
                m[(mul_mod(r, a, q) as usize, a as usize)] = ONE;
            }
        }
        GateTag::Cpg => {
            for a in 0..q {
                for b in 0..q {
                    let i = (a * q + b) as usize;
                    m[(i, i)] = root_of_unity(mul_mod(a, b, q) as u64, q);
                }
            }
        }
        GateTag::X => {
            for a in 0..qs {
                m[((a + 1) % qs, a)] = ONE;
            }
        }
        GateTag::Z => {
            for a in 0..q {
                m[(a as usize, a as usize)] = root_of_unity(a as u64, q);
            }
        }
        GateTag::K => {
            m[(0, 0)] = ONE;
            m[(1, 1)] = C64::new(0.0, 1.0);
        }
    }
    UnitaryMatrix::new_unchecked(shape, m)
}

/// `G P G^dagger` up to phase, for Clifford gates on the gate's own wires.
pub fn conjugate_symbolic(tag: &GateTag, p: &SymbolicPauli) -> Result<SymbolicPauli> {
    let q = p.q();
    check_field(tag, q)?;
    if p.num_wires() != tag.arity() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} acts on {} wires, Pauli has {}",
            tag,
            tag.arity(),
            p.num_wires()
        )));
    }
    let (x, z) = (p.x(), p.z());
    let (nx, nz): (Vec<u32>, Vec<u32>) = match *tag {
        GateTag::F | GateTag::Fr(_) | GateTag::H => {
            let r = if let GateTag::Fr(r) = *tag { r % q } else { 1 };
            let rinv = inv_mod(r, q)?;
            (
                vec![neg_mod(mul_mod(rinv, z[0], q), q)],
                vec![mul_mod(r, x[0], q)],
            )
        }
        GateTag::Sum | GateTag::Cnot => (
            vec![x[0], add_mod(x[1], x[0], q)],
            vec![sub_mod(z[0], z[1], q), z[1]],
        ),
        GateTag::Mr(r) => (vec![mul_mod(r, x[0], q)], vec![mul_mod(inv_mod(r, q)?, z[0], q)]),
        GateTag::Cpg => (
            x.to_vec(),
            vec![add_mod(z[0], x[1], q), add_mod(z[1], x[0], q)],
        ),
        GateTag::X | GateTag::Z => (x.to_vec(), z.to_vec()),
        GateTag::K => (x.to_vec(), vec![add_mod(z[0], x[0], q)]),
        GateTag::Toffoli => {
            return Err(Error::UnsupportedGate("Toffoli is not a Clifford gate".into()));
        }
    };
    SymbolicPauli::new(q, nx, nz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_rule(tag: GateTag, q: u32) {
        let g = gate_matrix(&tag, q).unwrap();
        let n = tag.arity();
        for p in SymbolicPauli::all(q, n) {
            let lhs = g.matrix().mul(p.matrix().matrix()).mul(&g.matrix().adjoint());
            let rhs = conjugate_symbolic(&tag, &p).unwrap().matrix();
            assert!(
                lhs.equal_up_to_phase(rhs.matrix(), 1e-9),
                "{tag:?} on {p:?} (q = {q})"
            );
        }
    }

    #[test]
    fn conjugation_rules_match_matrices() {
        for q in [3, 5] {
            for tag in [GateTag::F, GateTag::Fr(2), GateTag::Sum, GateTag::Mr(2), GateTag::Cpg, GateTag::X, GateTag::Z] {
                check_rule(tag, q);
            }
        }
        for tag in [GateTag::H, GateTag::K, GateTag::Cnot, GateTag::Cpg, GateTag::F] {
            check_rule(tag, 2);
        }
    }

    #[test]
    fn gate_matrices_are_unitary() {
        for tag in [GateTag::F, GateTag::Fr(3), GateTag::Sum, GateTag::Toffoli, GateTag::Mr(4), GateTag::Cpg] {
            assert!(gate_matrix(&tag, 5).unwrap().matrix().unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn toffoli_is_not_conjugated() {
        let p = SymbolicPauli::identity(5, 3);
        assert!(matches!(conjugate_symbolic(&GateTag::Toffoli, &p), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn qubit_gates_reject_qudits() {
        assert!(gate_matrix(&GateTag::H, 5).is_err());
        assert!(gate_matrix(&GateTag::Mr(0), 5).is_err());
    }

    #[test]
    fn fourier_inverse_is_cube() {
        let f = Gate::new(GateTag::F);
        let fi = f.inverse(5).matrix(5).unwrap();
        let prod = f.matrix(5).unwrap().compose(&fi).unwrap();
        assert!(prod.matrix().max_abs_diff(&Matrix::identity(5)) < 1e-12);
    }

    #[test]
    fn multiplier_order() {
        assert_eq!(GateTag::Mr(2).order(5), 4);
        assert_eq!(GateTag::Mr(4).order(5), 2);
        let m = Gate::new(GateTag::Mr(2));
        let prod = m.matrix(5).unwrap().compose(&m.inverse(5).matrix(5).unwrap()).unwrap();
        assert!(prod.matrix().max_abs_diff(&Matrix::identity(5)) < 1e-12);
    }
}
