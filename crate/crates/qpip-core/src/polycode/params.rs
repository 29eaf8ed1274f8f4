use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcalg::pauli::SymbolicPauli;
use crate::qcore::field::{inv_mod, is_prime, lagrange_interpolate, mul_mod, neg_mod, poly_eval, pow_mod, sub_mod};
use crate::qcore::rng::random_digits;

/// Parameters of the signed polynomial code: degree `d`, `m = 2d + 1`
/// evaluation points in F_q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCodeParams", into = "RawCodeParams")]
pub struct CodeParams {
    q: u32,
    d: usize,
    alphas: Vec<u32>,
    interp_c: Vec<u32>,
    /// `h[t][j]`: the degree-`d` Lagrange basis over the nodes `(0, alpha_1..alpha_d)`
    /// (zero-based alpha indices) evaluated at `alpha_j`.
    h: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCodeParams {
    q: u32,
    d: usize,
    alphas: Vec<u32>,
}

impl TryFrom<RawCodeParams> for CodeParams {
    type Error = Error;
    fn try_from(raw: RawCodeParams) -> Result<Self> {
        CodeParams::new(raw.q, raw.d, raw.alphas)
    }
}

impl From<CodeParams> for RawCodeParams {
    fn from(p: CodeParams) -> Self {
        RawCodeParams {
            q: p.q,
            d: p.d,
            alphas: p.alphas,
        }
    }
}

impl CodeParams {
    pub fn new(q: u32, d: usize, alphas: Vec<u32>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let m = 2 * d + 1;
        if d == 0 {
            return Err(Error::InvalidCode("degree must be at least 1".into()));
        }
        if alphas.len() != m {
            return Err(Error::InvalidCode(format!("{} evaluation points for m = {m}", alphas.len())));
        }
        if q as usize <= m {
            return Err(Error::InvalidCode(format!("q = {q} must exceed m = {m}")));
        }
        for (i, &a) in alphas.iter().enumerate() {
            if a % q == 0 || a >= q {
                return Err(Error::InvalidCode(format!("evaluation point {a} is not a nonzero element of F_{q}")));
            }
            if alphas[..i].contains(&a) {
                return Err(Error::InvalidCode(format!("evaluation point {a} repeated")));
            }
        }
        let interp_c = (0..m)
            .map(|i| lagrange_at_zero(&alphas, i, q))
            .collect::<Result<Vec<_>>>()?;
        let mut nodes = Vec::with_capacity(d + 1);
        nodes.push(0);
        nodes.extend_from_slice(&alphas[1..=d]);
        let mut h = Vec::with_capacity(d + 1);
        for t in 0..=d {
            let mut unit = alloc::vec![0u32; d + 1];
            unit[t] = 1;
            let basis = lagrange_interpolate(&nodes, &unit, q)?;
            h.push(alphas.iter().map(|&a| poly_eval(&basis, a, q)).collect());
        }
        Ok(Self {
            q,
            d,
            alphas,
            interp_c,
            h,
        })
    }

    /// `q = 5`, `d = 1`, `alpha = (1, 2, 3)`.
    pub fn default_instance() -> Self {
        Self::new(5, 1, alloc::vec![1, 2, 3]).expect("default parameters are valid")
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        2 * self.d + 1
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    /// `c_i` with `sum_i c_i f(alpha_i) = f(0)` for `deg f <= m - 1`.
    pub fn interp_c(&self) -> &[u32] {
        &self.interp_c
    }

    /// Replaces the interpolation coefficients without re-deriving them. Only
    /// meant for fault-injection runs of the lemma suite.
    pub fn with_interp_c(mut self, c: Vec<u32>) -> Self {
        self.interp_c = c;
        self
    }

    pub fn h_table(&self) -> &[Vec<u32>] {
        &self.h
    }

    /// Checks the interpolation identity on every monomial of degree `< m`.
    pub fn check_interpolation(&self) -> bool {
        (0..self.m()).all(|t| {
            let lhs = self
                .alphas
                .iter()
                .zip(&self.interp_c)
                .fold(0, |acc, (&a, &c)| (acc + mul_mod(c, pow_mod(a, t as u64, self.q), self.q)) % self.q);
            lhs == if t == 0 { 1 } else { 0 }
        })
    }

    /// Checks `h_0(x) f(0) + sum_t h_t(x) f(alpha_t) = f(x)` at every alpha for monomials of degree `<= d`.
    pub fn check_h_table(&self) -> bool {
        let q = self.q;
        (0..=self.d).all(|t| {
            let f = |x: u32| pow_mod(x, t as u64, q);
            (0..self.m()).all(|j| {
                let mut acc = mul_mod(self.h[0][j], if t == 0 { 1 } else { 0 }, q);
                for s in 1..=self.d {
                    acc = (acc + mul_mod(self.h[s][j], f(self.alphas[s]), q)) % q;
                }
                acc == f(self.alphas[j])
            })
        })
    }

    /// `(k_i f(alpha_i))_i` for coefficients `f`.
    pub fn signed_evaluations(&self, f: &[u32], k: &SignKey) -> Vec<u32> {
        let kf = k.as_field(self.q);
        self.alphas
            .iter()
            .zip(&kf)
            .map(|(&a, &s)| mul_mod(s, poly_eval(f, a, self.q), self.q))
            .collect()
    }

    /// All coefficient vectors of degree `<= d` with the given constant term.
    pub fn polynomials_with_constant(&self, a: u32) -> impl Iterator<Item = Vec<u32>> + '_ {
        let count = (self.q as usize).pow(self.d as u32);
        (0..count).map(move |mut idx| {
            let mut f = alloc::vec![a % self.q; self.d + 1];
            for c in f.iter_mut().skip(1) {
                *c = (idx % self.q as usize) as u32;
                idx /= self.q as usize;
            }
            f
        })
    }
}

fn lagrange_at_zero(alphas: &[u32], i: usize, q: u32) -> Result<u32> {
    let mut num = 1;
    let mut den = 1;
    for (j, &a) in alphas.iter().enumerate() {
        if j != i {
            num = mul_mod(num, neg_mod(a, q), q);
            den = mul_mod(den, sub_mod(alphas[i], a, q), q);
        }
    }
    Ok(mul_mod(num, inv_mod(den, q)?, q))
}

/// Sign vector `k` in `{-1, +1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignKey(Vec<i8>);

impl SignKey {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("sign key entries must be +1 or -1".into()));
        }
        Ok(Self(signs))
    }

    pub fn ones(m: usize) -> Self {
        Self(alloc::vec![1; m])
    }

    /// All `2^m` keys; bit `i` of the index set means `k_i = -1`.
    pub fn all(m: usize) -> impl Iterator<Item = SignKey> {
        (0..1usize << m).map(move |bits| SignKey((0..m).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect()))
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self((0..m).map(|_| if rng.gen::<bool>() { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    /// Entries as field elements (`-1` becomes `q - 1`).
    pub fn as_field(&self, q: u32) -> Vec<u32> {
        self.0.iter().map(|&s| if s == 1 { 1 } else { q - 1 }).collect()
    }
}

/// One-time-pad Pauli key `Z^z X^x` for one authenticated block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliKey {
    pub x: Vec<u32>,
    pub z: Vec<u32>,
}

impl PauliKey {
    pub fn zero(m: usize) -> Self {
        Self {
            x: alloc::vec![0; m],
            z: alloc::vec![0; m],
        }
    }

    pub fn random<R: Rng + ?Sized>(m: usize, q: u32, rng: &mut R) -> Self {
        Self {
            x: random_digits(m, q, rng),
            z: random_digits(m, q, rng),
        }
    }

    pub fn to_pauli(&self, q: u32) -> SymbolicPauli {
        SymbolicPauli::new(q, self.x.clone(), self.z.clone()).expect("key parts have equal length")
    }

    pub fn from_pauli(p: &SymbolicPauli) -> Self {
        Self {
            x: p.x().to_vec(),
            z: p.z().to_vec(),
        }
    }
}
