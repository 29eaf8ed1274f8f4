//! Transversal logical gates and classical decoding of block measurements.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::encode::{check_key, dk_inverse, GateStep};
use super::params::{CodeParams, PauliKey, SignKey};
use crate::error::{Error, Result};
use crate::pcalg::gates::{Gate, GateTag};
use crate::qcore::field::{mul_mod, sub_mod};
use crate::qcore::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalGateTag {
    /// Logical `X^x`: `X^{k_i x}` on every wire.
    LX(u32),
    /// Logical `Z^z`: `Z^{k_i c_i z}` on every wire.
    LZ(u32),
    /// Logical SUM between two blocks: transversal SUM.
    LSum,
    /// Logical Fourier: `F_{c_i}` on every wire.
    LF,
    /// Inverse of `LF`.
    LFInv,
    /// Logical multiplier `|a> -> |ra>`: `M_r` on every wire.
    LMul(u32),
}

impl LogicalGateTag {
    pub fn arity(&self) -> usize {
        match self {
            LogicalGateTag::LSum => 2,
            _ => 1,
        }
    }

    /// True for gates the verifier realizes purely by a key update.
    pub fn is_pauli(&self) -> bool {
        matches!(self, LogicalGateTag::LX(_) | LogicalGateTag::LZ(_))
    }
}

/// An encoded block: `m` consecutive wires starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub sign: SignKey,
}

impl Block {
    pub fn new(start: usize, sign: SignKey) -> Self {
        Self { start, sign }
    }

    pub fn wires(&self, p: &CodeParams) -> Vec<usize> {
        (self.start..self.start + p.m()).collect()
    }
}

/// The physical transversal gates implementing a logical gate, on global wires.
pub fn transversal_steps(tag: LogicalGateTag, blocks: &[Block], p: &CodeParams) -> Result<Vec<GateStep>> {
    if blocks.len() != tag.arity() {
        return Err(Error::ShapeMismatch(format!("{tag:?} takes {} blocks, got {}", tag.arity(), blocks.len())));
    }
    for b in blocks {
        check_key(&b.sign, p)?;
    }
    let q = p.q();
    let c = p.interp_c();
    let kf = blocks[0].sign.as_field(q);
    let w = blocks[0].wires(p);
    let steps: Vec<GateStep> = match tag {
        LogicalGateTag::LX(x) => (0..p.m())
            .map(|i| (Gate::pow(GateTag::X, mul_mod(kf[i], x % q, q)), vec![w[i]]))
            .collect(),
        LogicalGateTag::LZ(z) => (0..p.m())
            .map(|i| (Gate::pow(GateTag::Z, mul_mod(mul_mod(kf[i], c[i], q), z % q, q)), vec![w[i]]))
            .collect(),
        LogicalGateTag::LSum => {
            if blocks[0].sign != blocks[1].sign {
                return Err(Error::SignKeyMismatch);
            }
            let v = blocks[1].wires(p);
            (0..p.m()).map(|i| (Gate::new(GateTag::Sum), vec![w[i], v[i]])).collect()
        }
        LogicalGateTag::LF => (0..p.m()).map(|i| (Gate::new(GateTag::Fr(c[i])), vec![w[i]])).collect(),
        LogicalGateTag::LFInv => (0..p.m()).map(|i| (Gate::pow(GateTag::Fr(c[i]), 3), vec![w[i]])).collect(),
        LogicalGateTag::LMul(r) => {
            if r % q == 0 {
                return Err(Error::InvalidParameter("logical multiplier must be nonzero".into()));
            }
            (0..p.m()).map(|i| (Gate::new(GateTag::Mr(r % q)), vec![w[i]])).collect()
        }
    };
    Ok(steps
        .into_iter()
        .filter(|(g, _)| g.power != 0)
        .collect())
}

/// Applies a logical gate transversally to the encoded blocks of `state`.
pub fn apply_logical(tag: LogicalGateTag, state: &StateVector, blocks: &[Block], p: &CodeParams) -> Result<StateVector> {
    let mut out = state.clone();
    for (g, wires) in transversal_steps(tag, blocks, p)? {
        out.apply(&g.matrix(p.q())?, &wires)?;
    }
    Ok(out)
}

/// Result of decoding one measured block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedResult {
    pub value: u32,
    pub valid: bool,
    /// The last `d` coordinates after undoing `D_k`; all zero for a valid string.
    pub residual: Vec<u32>,
}

/// Removes the key's X part, undoes `D_k` classically and reads the first
/// coordinate. The Z part of the key has no effect on basis strings.
pub fn decode_measurement(raw: &[u32], k: &SignKey, pkey: &PauliKey, p: &CodeParams) -> Result<DecodedResult> {
    if raw.len() != p.m() || pkey.x.len() != p.m() {
        return Err(Error::ShapeMismatch("measured string and key must have length m".into()));
    }
    let q = p.q();
    let unpadded: Vec<u32> = raw.iter().zip(&pkey.x).map(|(&r, &x)| sub_mod(r % q, x, q)).collect();
    let w = dk_inverse(&unpadded, k, p)?;
    let residual = w[p.d() + 1..].to_vec();
    Ok(DecodedResult {
        value: w[0],
        valid: residual.iter().all(|&v| v == 0),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycode::encode::{block_shape, codeword_state};
    use crate::qcore::linalg::root_of_unity;
    use crate::qcore::rng::seeded;
    use crate::qcore::state::measure_wires;

    fn blk(k: &SignKey) -> Vec<Block> {
        vec![Block::new(0, k.clone())]
    }

    #[test]
    fn logical_x_shifts_codewords() {
        let p = CodeParams::default_instance();
        for k in SignKey::all(3) {
            for a in 0..5 {
                let s = codeword_state(a, &k, &p).unwrap();
                let t = apply_logical(LogicalGateTag::LX(1), &s, &blk(&k), &p).unwrap();
                let want = codeword_state((a + 1) % 5, &k, &p).unwrap();
                assert!(t.fidelity(&want) > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn logical_z_is_a_phase() {
        let p = CodeParams::default_instance();
        let k = SignKey::new(vec![1, -1, -1]).unwrap();
        for a in 0..5 {
            for z in 0..5 {
                let s = codeword_state(a, &k, &p).unwrap();
                let t = apply_logical(LogicalGateTag::LZ(z), &s, &blk(&k), &p).unwrap();
                let ph = s.inner(&t);
                assert!((ph - root_of_unity((a * z) as u64, 5)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn logical_sum_adds_into_second_block() {
        let p = CodeParams::default_instance();
        let k = SignKey::new(vec![-1, 1, -1]).unwrap();
        let blocks = vec![Block::new(0, k.clone()), Block::new(3, k.clone())];
        for (a, b) in [(1, 2), (4, 4), (0, 3)] {
            let s = codeword_state(a, &k, &p).unwrap().tensor(&codeword_state(b, &k, &p).unwrap()).unwrap();
            let t = apply_logical(LogicalGateTag::LSum, &s, &blocks, &p).unwrap();
            let want = codeword_state(a, &k, &p)
                .unwrap()
                .tensor(&codeword_state((a + b) % 5, &k, &p).unwrap())
                .unwrap();
            assert!(t.fidelity(&want) > 1.0 - 1e-9);
        }
        let other = vec![Block::new(0, k.clone()), Block::new(3, k.negated())];
        let s = codeword_state(0, &k, &p).unwrap().tensor(&codeword_state(0, &k, &p).unwrap()).unwrap();
        assert_eq!(apply_logical(LogicalGateTag::LSum, &s, &other, &p), Err(Error::SignKeyMismatch));
    }

    #[test]
    fn logical_fourier_is_fourier_on_the_same_code() {
        let p = CodeParams::default_instance();
        for k in SignKey::all(3) {
            for a in 0..5u32 {
                let s = codeword_state(a, &k, &p).unwrap();
                let t = apply_logical(LogicalGateTag::LF, &s, &blk(&k), &p).unwrap();
                for b in 0..5u32 {
                    let amp = codeword_state(b, &k, &p).unwrap().inner(&t);
                    let want = root_of_unity((a * b) as u64, 5) / libm::sqrt(5.0);
                    assert!((amp - want).norm() < 1e-9, "k = {k:?}, a = {a}, b = {b}");
                }
                let back = apply_logical(LogicalGateTag::LFInv, &t, &blk(&k), &p).unwrap();
                assert!(back.fidelity(&s) > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn logical_multiplier_scales_codewords() {
        let p = CodeParams::default_instance();
        let k = SignKey::new(vec![1, 1, -1]).unwrap();
        for a in 0..5u32 {
            let s = codeword_state(a, &k, &p).unwrap();
            let t = apply_logical(LogicalGateTag::LMul(3), &s, &blk(&k), &p).unwrap();
            assert!(t.fidelity(&codeword_state(3 * a % 5, &k, &p).unwrap()) > 1.0 - 1e-9);
        }
        assert!(transversal_steps(LogicalGateTag::LMul(5), &blk(&k), &p).is_err());
    }

    #[test]
    fn honest_measurements_decode_valid() {
        let p = CodeParams::default_instance();
        let mut rng = seeded(17);
        let wires: Vec<usize> = (0..3).collect();
        for k in SignKey::all(3) {
            for a in 0..5 {
                let s = codeword_state(a, &k, &p).unwrap();
                for _ in 0..20 {
                    let (digits, _) = measure_wires(&s, &wires, &mut rng).unwrap();
                    let raw: Vec<u32> = digits.iter().map(|&d| d as u32).collect();
                    let out = decode_measurement(&raw, &k, &PauliKey::zero(3), &p).unwrap();
                    assert!(out.valid);
                    assert_eq!(out.value, a);
                }
            }
        }
        assert_eq!(block_shape(&p).total_dim(), 125);
    }
}
