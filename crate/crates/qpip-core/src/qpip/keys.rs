//! Pauli-key bookkeeping for logical gates on the signed polynomial code.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::schedule::logical_gate;
use crate::error::{Error, Result};
use crate::polycode::{apply_logical, ek_matrix, Block, CodeParams, LogicalGateTag, PauliKey, SignKey};
use crate::qcore::field::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod};
use crate::qcore::linalg::C64;
use crate::qcore::rng::random_state;
use crate::qcore::{RegisterShape, StateVector};

/// Updates the Pauli keys of the listed blocks so that decoding after the
/// logical gate uses the conjugated pad. Pauli gates are realized by this
/// update alone; Clifford gates also act physically.
pub fn pauli_key_update(
    keys: &mut [PauliKey],
    sign: &SignKey,
    tag: LogicalGateTag,
    blocks: &[usize],
    p: &CodeParams,
) -> Result<()> {
    if blocks.len() != tag.arity() {
        return Err(Error::ShapeMismatch(format!("{tag:?} takes {} blocks", tag.arity())));
    }
    if blocks.iter().any(|&b| b >= keys.len()) {
        return Err(Error::InvalidParameter(format!("block index out of range in {blocks:?}")));
    }
    if sign.len() != p.m() || blocks.iter().any(|&b| keys[b].x.len() != p.m()) {
        return Err(Error::ShapeMismatch("key length differs from m".into()));
    }
    let q = p.q();
    let c = p.interp_c();
    let kf = sign.as_field(q);
    let m = p.m();
    match tag {
        LogicalGateTag::LX(a) => {
            let key = &mut keys[blocks[0]];
            for i in 0..m {
                key.x[i] = sub_mod(key.x[i], mul_mod(a % q, kf[i], q), q);
            }
        }
        LogicalGateTag::LZ(b) => {
            let key = &mut keys[blocks[0]];
            for i in 0..m {
                key.z[i] = sub_mod(key.z[i], mul_mod(b % q, mul_mod(c[i], kf[i], q), q), q);
            }
        }
        LogicalGateTag::LSum => {
            let (a, b) = (blocks[0], blocks[1]);
            if a == b {
                return Err(Error::RepeatedWire(a));
            }
            for i in 0..m {
                let za = sub_mod(keys[a].z[i], keys[b].z[i], q);
                let xb = add_mod(keys[b].x[i], keys[a].x[i], q);
                keys[a].z[i] = za;
                keys[b].x[i] = xb;
            }
        }
        LogicalGateTag::LF => {
            let key = &mut keys[blocks[0]];
            for i in 0..m {
                let (x, z) = (key.x[i], key.z[i]);
                key.x[i] = neg_mod(mul_mod(inv_mod(c[i], q)?, z, q), q);
                key.z[i] = mul_mod(c[i], x, q);
            }
        }
        LogicalGateTag::LFInv => {
            let key = &mut keys[blocks[0]];
            for i in 0..m {
                let (x, z) = (key.x[i], key.z[i]);
                key.x[i] = mul_mod(inv_mod(c[i], q)?, z, q);
                key.z[i] = neg_mod(mul_mod(c[i], x, q), q);
            }
        }
        LogicalGateTag::LMul(r) => {
            let rinv = inv_mod(r % q, q)?;
            let key = &mut keys[blocks[0]];
            for i in 0..m {
                key.x[i] = mul_mod(r % q, key.x[i], q);
                key.z[i] = mul_mod(rinv, key.z[i], q);
            }
        }
    }
    Ok(())
}

/// Fresh independent Pauli keys for `blocks` blocks.
pub fn fresh_keys<R: rand::Rng + ?Sized>(blocks: usize, p: &CodeParams, rng: &mut R) -> Vec<PauliKey> {
    (0..blocks).map(|_| PauliKey::random(p.m(), p.q(), rng)).collect()
}

/// Pads and encodes each one-qudit message of `msgs` into its own block of
/// `m` consecutive wires.
pub fn encode_blocks(msgs: &StateVector, k: &SignKey, keys: &[PauliKey], p: &CodeParams) -> Result<StateVector> {
    let nb = keys.len();
    let q = p.q() as usize;
    let m = p.m();
    let ek = ek_matrix(k, p)?;
    let shape = RegisterShape::qudits(nb * m, q)?;
    // message j sits on wire j*m with zero auxiliaries
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    let mut digits = vec![0; nb * m];
    for (idx, a) in msgs.amplitudes().iter().enumerate() {
        for (j, d) in msgs.shape().digits(idx).into_iter().enumerate() {
            digits[j * m] = d;
        }
        amps[shape.index(&digits)?] = *a;
    }
    let mut s = StateVector::new(shape, amps)?;
    for (j, key) in keys.iter().enumerate() {
        let wires: Vec<usize> = (j * m..(j + 1) * m).collect();
        s.apply(&ek, &wires)?;
        key.to_pauli(p.q()).apply_to(&mut s, &wires)?;
    }
    Ok(s)
}

/// `1 - F` between (logical gate applied transversally to an encoded random
/// message) and (the unencoded gate applied to the message, encoded under the
/// updated keys). Zero when the update rule commutes with decoding.
pub fn key_update_residual<R: Rng + ?Sized>(tag: LogicalGateTag, p: &CodeParams, rng: &mut R) -> Result<f64> {
    let nb = tag.arity();
    let k = SignKey::random(p.m(), rng);
    let keys = fresh_keys(nb, p, rng);
    let msgs = random_state(RegisterShape::qudits(nb, p.q() as usize)?, rng);
    let mut state = encode_blocks(&msgs, &k, &keys, p)?;
    let blocks: Vec<Block> = (0..nb).map(|j| Block::new(p.m() * j, k.clone())).collect();
    if !tag.is_pauli() {
        state = apply_logical(tag, &state, &blocks, p)?;
    }
    let mut updated = keys.clone();
    let idx: Vec<usize> = (0..nb).collect();
    pauli_key_update(&mut updated, &k, tag, &idx, p)?;
    let mut want = msgs.clone();
    want.apply(&logical_gate(tag).matrix(p.q())?, &idx)?;
    let expected = encode_blocks(&want, &k, &updated, p)?;
    Ok(1.0 - expected.fidelity(&state))
}
