//! The qubit Clifford group modulo phases, keyed by signed stabilizer tableaux.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{gate_matrix, GateTag};
use super::pauli::SymbolicPauli;
use crate::error::{Error, Result};
use crate::qcore::linalg::{Matrix, C64, ONE, ZERO};
use crate::qcore::{RegisterShape, StateVector, UnitaryMatrix};

/// Largest register handled by tableau keys and random sampling.
pub const MAX_SAMPLED_QUBITS: usize = 3;
/// Largest register the full group is enumerated for.
pub const MAX_ENUMERATED_QUBITS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliffordGen {
    H(usize),
    K(usize),
    Cnot(usize, usize),
}

impl CliffordGen {
    fn wires(&self) -> Vec<usize> {
        match *self {
            CliffordGen::H(a) | CliffordGen::K(a) => vec![a],
            CliffordGen::Cnot(a, b) => vec![a, b],
        }
    }

    fn tag(&self) -> GateTag {
        match self {
            CliffordGen::H(_) => GateTag::H,
            CliffordGen::K(_) => GateTag::K,
            CliffordGen::Cnot(..) => GateTag::Cnot,
        }
    }

    /// Every generator on `n` qubits.
    pub fn all(n: usize) -> Vec<CliffordGen> {
        let mut gens = Vec::new();
        for a in 0..n {
            gens.push(CliffordGen::H(a));
            gens.push(CliffordGen::K(a));
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    gens.push(CliffordGen::Cnot(a, b));
                }
            }
        }
        gens
    }
}

/// Images of `X_0..X_{n-1}, Z_0..Z_{n-1}` under conjugation, as signed Pauli
/// strings with bit `j` standing for wire `j` (`x = z = 1` is `Y`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tableau {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<bool>,
}

impl Tableau {
    pub fn identity(n: usize) -> Self {
        let mut t = Self {
            n,
            x: vec![0; 2 * n],
            z: vec![0; 2 * n],
            sign: vec![false; 2 * n],
        };
        for i in 0..n {
            t.x[i] = 1 << i;
            t.z[n + i] = 1 << i;
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Left-multiplies the represented Clifford by a generator.
    pub fn apply(&mut self, g: CliffordGen) {
        for row in 0..2 * self.n {
            let (x, z) = (self.x[row], self.z[row]);
            match g {
                CliffordGen::H(a) => {
                    let (xa, za) = ((x >> a) & 1, (z >> a) & 1);
                    self.sign[row] ^= xa & za == 1;
                    self.x[row] = (x & !(1 << a)) | (za << a);
                    self.z[row] = (z & !(1 << a)) | (xa << a);
                }
                CliffordGen::K(a) => {
                    let (xa, za) = ((x >> a) & 1, (z >> a) & 1);
                    self.sign[row] ^= xa & za == 1;
                    self.z[row] = z ^ (xa << a);
                }
                CliffordGen::Cnot(a, b) => {
                    let (xa, za) = ((x >> a) & 1, (z >> a) & 1);
                    let (xb, zb) = ((x >> b) & 1, (z >> b) & 1);
                    self.sign[row] ^= xa & zb & (xb ^ za ^ 1) == 1;
                    self.x[row] = x ^ (xa << b);
                    self.z[row] = z ^ (zb << a);
                }
            }
        }
    }

    /// Compact key, unique for `n <= 5`.
    pub fn key(&self) -> u128 {
        let mut k: u128 = 0;
        for row in 0..2 * self.n {
            k = (k << self.n) | self.x[row] as u128;
            k = (k << self.n) | self.z[row] as u128;
            k = (k << 1) | self.sign[row] as u128;
        }
        k
    }

    /// Image of `X_j` (`j < n`) or `Z_{j-n}` as `(x mask, z mask, negative)`.
    pub fn row(&self, row: usize) -> (u64, u64, bool) {
        (self.x[row], self.z[row], self.sign[row])
    }

    /// Checks that the rows form a symplectic basis.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in 0..2 * n {
                let anti = symplectic_bit(self.x[a], self.z[a], self.x[b], self.z[b]);
                let want = (a + n == b) || (b + n == a);
                if anti != want {
                    return false;
                }
            }
        }
        true
    }

    /// Unitary (up to global phase) realizing this tableau.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.n;
        let d = 1usize << n;
        let shape = RegisterShape::qubits(n).expect("small register");
        // C|0> is the joint +1 eigenvector of the Z images
        let mut proj = Matrix::identity(d);
        for i in 0..n {
            let s = signed_pauli_matrix(n, self.x[n + i], self.z[n + i], self.sign[n + i]);
            proj = proj.mul(&Matrix::identity(d).add(&s)).scale(C64::new(0.5, 0.0));
        }
        let mut v0 = vec![ZERO; d];
        for c in 0..d {
            let col = proj.column(c);
            if col.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6 {
                v0 = col;
                break;
            }
        }
        let v0 = StateVector::normalized(shape, v0).expect("stabilizer state exists");
        let xs: Vec<Matrix> = (0..n)
            .map(|j| signed_pauli_matrix(n, self.x[j], self.z[j], self.sign[j]))
            .collect();
        let mut out = Matrix::zeros(d, d);
        for b in 0..d {
            let mut v = v0.amplitudes().to_vec();
            for (j, xj) in xs.iter().enumerate() {
                // column digit of wire j (wire 0 most significant)
                if (b >> (n - 1 - j)) & 1 == 1 {
                    v = xj.mul_vec(&v);
                }
            }
            for r in 0..d {
                out[(r, b)] = v[r];
            }
        }
        out
    }
}

fn symplectic_bit(x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    ((x1 & z2) ^ (z1 & x2)).count_ones() & 1 == 1
}

/// Dense matrix of `(-1)^sign` times the Pauli string with the given masks.
fn signed_pauli_matrix(n: usize, x: u64, z: u64, negative: bool) -> Matrix {
    let i = C64::new(0.0, 1.0);
    let mut m = Matrix::identity(1);
    for j in 0..n {
        let letter = match ((x >> j) & 1, (z >> j) & 1) {
            (0, 0) => Matrix::identity(2),
            (1, 0) => Matrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap(),
            (0, 1) => Matrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE]).unwrap(),
            _ => Matrix::from_vec(2, 2, vec![ZERO, -i, i, ZERO]).unwrap(),
        };
        m = m.kron(&letter);
    }
    if negative {
        m = m.scale(-ONE);
    }
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    tableau: Tableau,
    matrix: UnitaryMatrix,
    word: Option<Vec<CliffordGen>>,
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        Self {
            tableau: Tableau::identity(n),
            matrix: UnitaryMatrix::identity(RegisterShape::qubits(n).expect("small register")),
            word: Some(Vec::new()),
        }
    }

    /// Product of generators in time order (`word[0]` acts first).
    pub fn from_word(n: usize, word: &[CliffordGen]) -> Result<Self> {
        let mut e = Self::identity(n);
        for &g in word {
            e.push(g)?;
        }
        Ok(e)
    }

    pub fn from_tableau(tableau: Tableau) -> Result<Self> {
        if !tableau.is_symplectic() {
            return Err(Error::InvalidParameter("tableau rows are not a symplectic basis".into()));
        }
        let shape = RegisterShape::qubits(tableau.num_qubits())?;
        let matrix = UnitaryMatrix::new(shape, tableau.to_matrix())?;
        Ok(Self {
            tableau,
            matrix,
            word: None,
        })
    }

    fn push(&mut self, g: CliffordGen) -> Result<()> {
        let n = self.tableau.num_qubits();
        for w in g.wires() {
            if w >= n {
                return Err(Error::WireOutOfRange(w));
            }
        }
        let shape = RegisterShape::qubits(n)?;
        let gm = gate_matrix(&g.tag(), 2)?.embed(&shape, &g.wires())?;
        self.matrix = gm.compose(&self.matrix)?;
        self.tableau.apply(g);
        if let Some(w) = self.word.as_mut() {
            w.push(g);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.tableau.num_qubits()
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }

    pub fn word(&self) -> Option<&[CliffordGen]> {
        self.word.as_deref()
    }

    /// `C P C^dagger` up to phase.
    pub fn conjugate(&self, p: &SymbolicPauli) -> Result<SymbolicPauli> {
        let n = self.num_qubits();
        if p.q() != 2 || p.num_wires() != n {
            return Err(Error::ShapeMismatch("Pauli does not match the Clifford register".into()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for j in 0..n {
            if p.x()[j] == 1 {
                x ^= self.tableau.x[j];
                z ^= self.tableau.z[j];
            }
            if p.z()[j] == 1 {
                x ^= self.tableau.x[n + j];
                z ^= self.tableau.z[n + j];
            }
        }
        SymbolicPauli::new(
            2,
            (0..n).map(|j| ((x >> j) & 1) as u32).collect(),
            (0..n).map(|j| ((z >> j) & 1) as u32).collect(),
        )
    }
}

/// Explicit table of `C_n` (modulo phases) with a tableau index.
#[derive(Clone, Debug)]
pub struct CliffordGroup {
    n: usize,
    elements: Vec<CliffordElement>,
    index: BTreeMap<u128, usize>,
}

impl CliffordGroup {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CliffordElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &CliffordElement {
        &self.elements[i]
    }

    pub fn position(&self, t: &Tableau) -> Option<usize> {
        self.index.get(&t.key()).copied()
    }

    /// Uniform draw from the table.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &CliffordElement {
        &self.elements[rng.gen_range(0..self.elements.len())]
    }

    /// Generator words of every element, in table order.
    pub fn words(&self) -> Vec<Vec<CliffordGen>> {
        self.elements
            .iter()
            .map(|e| e.word().map(|w| w.to_vec()).unwrap_or_default())
            .collect()
    }

    /// Rebuilds a table from stored words, rejecting duplicates and wrong sizes.
    pub fn from_words(n: usize, words: &[Vec<CliffordGen>]) -> Result<Self> {
        let expected = clifford_group_order(n)?;
        if words.len() as u128 != expected {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} words for a group of order {expected}",
                words.len()
            )));
        }
        let mut elements = Vec::with_capacity(words.len());
        let mut index = BTreeMap::new();
        for w in words {
            let e = CliffordElement::from_word(n, w)?;
            if index.insert(e.tableau.key(), elements.len()).is_some() {
                return Err(Error::InvalidParameter("duplicate Clifford element".into()));
            }
            elements.push(e);
        }
        Ok(Self { n, elements, index })
    }
}

/// `|C_n|` modulo phases: `2^{n^2 + 2n} prod_j (4^j - 1)`.
pub fn clifford_group_order(n: usize) -> Result<u128> {
    if n > 5 {
        return Err(Error::UnsupportedCliffordSize(n));
    }
    let mut order: u128 = 1 << (n * n + 2 * n);
    for j in 1..=n {
        order *= (1u128 << (2 * j)) - 1;
    }
    Ok(order)
}

/// Breadth-first closure of the generators; supported for `n <= 2`.
pub fn enumerate_clifford(n: usize) -> Result<CliffordGroup> {
    if n == 0 || n > MAX_ENUMERATED_QUBITS {
        return Err(Error::UnsupportedCliffordSize(n));
    }
    let gens = CliffordGen::all(n);
    let shape = RegisterShape::qubits(n)?;
    let gen_mats: Vec<UnitaryMatrix> = gens
        .iter()
        .map(|g| gate_matrix(&g.tag(), 2)?.embed(&shape, &g.wires()))
        .collect::<Result<_>>()?;
    let root = CliffordElement::identity(n);
    let mut index = BTreeMap::new();
    index.insert(root.tableau.key(), 0);
    let mut elements = vec![root];
    let mut head = 0;
    while head < elements.len() {
        for (g, gm) in gens.iter().zip(&gen_mats) {
            let mut t = elements[head].tableau.clone();
            t.apply(*g);
            let key = t.key();
            if index.contains_key(&key) {
                continue;
            }
            let parent = &elements[head];
            let mut word = parent.word.clone().unwrap_or_default();
            word.push(*g);
            let child = CliffordElement {
                tableau: t,
                matrix: gm.compose(&parent.matrix)?,
                word: Some(word),
            };
            index.insert(key, elements.len());
            elements.push(child);
        }
        head += 1;
    }
    Ok(CliffordGroup { n, elements, index })
}

/// Uniform element of `C_n` for `n <= 3`, drawn as a random symplectic basis
/// with random signs.
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordElement> {
    if n == 0 || n > MAX_SAMPLED_QUBITS {
        return Err(Error::UnsupportedCliffordSize(n));
    }
    let full = (1u64 << (2 * n)) - 1;
    let split = |v: u64| (v & ((1 << n) - 1), v >> n);
    let mut chosen: Vec<(u64, u64)> = Vec::with_capacity(2 * n);
    let mut xs = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        let commutes_all = |x: u64, z: u64, chosen: &[(u64, u64)]| {
            chosen.iter().all(|&(cx, cz)| !symplectic_bit(x, z, cx, cz))
        };
        let xi = loop {
            let v = rng.gen_range(1..=full);
            let (x, z) = split(v);
            if commutes_all(x, z, &chosen) {
                break (x, z);
            }
        };
        let zi = loop {
            let v = rng.gen_range(0..=full);
            let (x, z) = split(v);
            if commutes_all(x, z, &chosen) && symplectic_bit(x, z, xi.0, xi.1) {
                break (x, z);
            }
        };
        chosen.push(xi);
        chosen.push(zi);
        xs.push(xi);
        zs.push(zi);
    }
    let mut t = Tableau::identity(n);
    for j in 0..n {
        t.x[j] = xs[j].0;
        t.z[j] = xs[j].1;
        t.x[n + j] = zs[j].0;
        t.z[n + j] = zs[j].1;
    }
    for s in t.sign.iter_mut() {
        *s = rng.gen::<bool>();
    }
    CliffordElement::from_tableau(t)
}
