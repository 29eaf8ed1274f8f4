//! Generalized Pauli operators `Z^z X^x` over F_q, tracked up to global phase.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::field::{add_mod, mul_mod, neg_mod, sub_mod};
use crate::qcore::linalg::{root_of_unity, Matrix, C64, ZERO};
use crate::qcore::{DensityMatrix, RegisterShape, StateVector, UnitaryMatrix};

/// Tensor product of `Z^{z_i} X^{x_i}`; `X|a> = |a+1>`, `Z|a> = w^a |a>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolicPauli {
    q: u32,
    x: Vec<u32>,
    z: Vec<u32>,
}

impl SymbolicPauli {
    pub fn new(q: u32, x: Vec<u32>, z: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("Pauli dimension {q}")));
        }
        if x.len() != z.len() {
            return Err(Error::ShapeMismatch(format!(
                "x part has {} wires, z part {}",
                x.len(),
                z.len()
            )));
        }
        let x = x.into_iter().map(|v| v % q).collect();
        let z = z.into_iter().map(|v| v % q).collect();
        Ok(Self { q, x, z })
    }

    pub fn identity(q: u32, n: usize) -> Self {
        Self {
            q,
            x: vec![0; n],
            z: vec![0; n],
        }
    }

    /// Single-wire Pauli embedded in `n` wires.
    pub fn single(q: u32, n: usize, wire: usize, x: u32, z: u32) -> Self {
        let mut p = Self::identity(q, n);
        p.x[wire] = x % q;
        p.z[wire] = z % q;
        p
    }

    /// Enumeration order: the x digits (wire 0 most significant) followed by the z digits.
    pub fn from_index(q: u32, n: usize, mut index: usize) -> Self {
        let mut digits = vec![0u32; 2 * n];
        for d in digits.iter_mut().rev() {
            *d = (index % q as usize) as u32;
            index /= q as usize;
        }
        Self {
            q,
            x: digits[..n].to_vec(),
            z: digits[n..].to_vec(),
        }
    }

    pub fn index(&self) -> usize {
        self.x
            .iter()
            .chain(&self.z)
            .fold(0usize, |acc, &d| acc * self.q as usize + d as usize)
    }

    /// All `q^{2n}` Paulis in enumeration order.
    pub fn all(q: u32, n: usize) -> impl Iterator<Item = SymbolicPauli> {
        let count = (q as usize).pow(2 * n as u32);
        (0..count).map(move |i| Self::from_index(q, n, i))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn num_wires(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[u32] {
        &self.x
    }

    pub fn z(&self) -> &[u32] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    /// True when the x part vanishes (the operator cannot change basis outcomes).
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&v| v == 0)
    }

    /// Product up to phase: exponents add.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            q: self.q,
            x: self.x.iter().zip(&other.x).map(|(a, b)| add_mod(*a, *b, self.q)).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| add_mod(*a, *b, self.q)).collect(),
        })
    }

    /// `self * other^{-1}` up to phase.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            q: self.q,
            x: self.x.iter().zip(&other.x).map(|(a, b)| sub_mod(*a, *b, self.q)).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| sub_mod(*a, *b, self.q)).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            q: self.q,
            x: self.x.iter().map(|&v| neg_mod(v, self.q)).collect(),
            z: self.z.iter().map(|&v| neg_mod(v, self.q)).collect(),
        }
    }

    /// Symplectic form; zero iff the two operators commute.
    pub fn symplectic(&self, other: &Self) -> u32 {
        let q = self.q;
        let mut acc = 0;
        for i in 0..self.x.len() {
            acc = add_mod(acc, mul_mod(self.z[i], other.x[i], q), q);
            acc = sub_mod(acc, mul_mod(self.x[i], other.z[i], q), q);
        }
        acc
    }

    /// The operator restricted to a subset of wires.
    pub fn restrict(&self, wires: &[usize]) -> Self {
        Self {
            q: self.q,
            x: wires.iter().map(|&w| self.x[w]).collect(),
            z: wires.iter().map(|&w| self.z[w]).collect(),
        }
    }

    /// Overwrites the listed wires with the parts of `local`.
    pub fn set_wires(&mut self, wires: &[usize], local: &Self) {
        for (i, &w) in wires.iter().enumerate() {
            self.x[w] = local.x[i];
            self.z[w] = local.z[i];
        }
    }

    /// Concatenation of wire lists.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut x = self.x.clone();
        x.extend_from_slice(&other.x);
        let mut z = self.z.clone();
        z.extend_from_slice(&other.z);
        Self { q: self.q, x, z }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.x.len() != other.x.len() {
            return Err(Error::ShapeMismatch("Paulis on different registers".into()));
        }
        Ok(())
    }

    /// Basis permutation and phases: the operator sends `|a>` to `phase[a] |perm[a]>`
    /// on a register of `shape` when acting on `wires`.
    pub(crate) fn monomial(&self, shape: &RegisterShape, wires: &[usize]) -> Result<(Vec<usize>, Vec<C64>)> {
        let sub = shape.select(wires)?;
        if sub.dims().iter().any(|&d| d != self.q as usize) || wires.len() != self.x.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}-wire Pauli over F_{} on wires with dims {:?}",
                self.x.len(),
                self.q,
                sub.dims()
            )));
        }
        let strides = shape.strides();
        let n = shape.total_dim();
        let mut perm = vec![0usize; n];
        let mut phase = vec![ZERO; n];
        let q = self.q as usize;
        for idx in 0..n {
            let mut target = idx;
            let mut exp = 0u64;
            for (i, &w) in wires.iter().enumerate() {
                let a = (idx / strides[w]) % q;
                let shifted = (a + self.x[i] as usize) % q;
                target = target - a * strides[w] + shifted * strides[w];
                exp += self.z[i] as u64 * shifted as u64;
            }
            perm[idx] = target;
            phase[idx] = root_of_unity(exp, self.q);
        }
        Ok((perm, phase))
    }

    pub fn matrix(&self) -> UnitaryMatrix {
        pauli_matrix(self)
    }

    /// Applies the operator to `wires` of a state vector.
    pub fn apply_to(&self, state: &mut StateVector, wires: &[usize]) -> Result<()> {
        let (perm, phase) = self.monomial(state.shape(), wires)?;
        let old = state.amplitudes().to_vec();
        let amps = state.amplitudes_mut();
        for (i, a) in old.iter().enumerate() {
            amps[perm[i]] = phase[i] * a;
        }
        Ok(())
    }

    /// `rho -> P rho P^dagger` on `wires`.
    pub fn conjugate_density(&self, rho: &DensityMatrix, wires: &[usize]) -> Result<DensityMatrix> {
        let (perm, phase) = self.monomial(rho.shape(), wires)?;
        let n = perm.len();
        let src = rho.matrix();
        let mut out = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(perm[r], perm[c])] = phase[r] * src[(r, c)] * phase[c].conj();
            }
        }
        DensityMatrix::new(rho.shape().clone(), out)
    }
}

/// Dense matrix of a symbolic Pauli on its own register.
pub fn pauli_matrix(p: &SymbolicPauli) -> UnitaryMatrix {
    let shape = RegisterShape::with_cap(vec![p.q as usize; p.num_wires()], usize::MAX)
        .expect("Pauli register dims are at least 2");
    let wires: Vec<usize> = (0..p.num_wires()).collect();
    let (perm, phase) = p.monomial(&shape, &wires).expect("wires match the operator");
    let n = perm.len();
    let mut m = Matrix::zeros(n, n);
    for (c, (&r, &ph)) in perm.iter().zip(&phase).enumerate() {
        m[(r, c)] = ph;
    }
    UnitaryMatrix::new_unchecked(shape, m).expect("dimension matches shape")
}

/// Expansion `U = sum_P P (x) U_P` over Paulis on `msg_wires`; returns every
/// `(P, U_P)` with `U_P = q^{-n} Tr_msg[(P^dagger (x) I) U]` acting on the
/// remaining wires (in increasing order).
pub fn pauli_components(
    u: &Matrix,
    shape: &RegisterShape,
    msg_wires: &[usize],
) -> Result<Vec<(SymbolicPauli, Matrix)>> {
    let sub = shape.select(msg_wires)?;
    let q = sub.dims().first().copied().unwrap_or(2);
    if sub.dims().iter().any(|&d| d != q) {
        return Err(Error::ShapeMismatch("message wires of unequal dimension".into()));
    }
    let rest = shape.complement(msg_wires);
    let m_off = shape.local_offsets(msg_wires);
    let e_off = shape.local_offsets(&rest);
    let dm = m_off.len();
    let de = e_off.len();
    let n = msg_wires.len();
    let local_shape = RegisterShape::with_cap(vec![q; n], usize::MAX)?;
    let all_local: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(dm * dm);
    for p in SymbolicPauli::all(q as u32, n) {
        let (perm, phase) = p.monomial(&local_shape, &all_local)?;
        let mut up = Matrix::zeros(de, de);
        for b in 0..dm {
            let a = perm[b];
            let w = phase[b].conj() / dm as f64;
            for (ei, &e) in e_off.iter().enumerate() {
                for (fi, &f) in e_off.iter().enumerate() {
                    up[(ei, fi)] += w * u[(m_off[a] + e, m_off[b] + f)];
                }
            }
        }
        out.push((p, up));
    }
    Ok(out)
}
