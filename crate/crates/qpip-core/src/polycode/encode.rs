//! Codewords, the interpolation circuit `D_k` and the encoder `E_k`.

use alloc::vec;
use alloc::vec::Vec;

use super::params::{CodeParams, SignKey};
use crate::error::{Error, Result};
use crate::pcalg::gates::{Gate, GateTag};
use crate::qcore::field::{add_mod, mul_mod};
use crate::qcore::linalg::{Matrix, C64};
use crate::qcore::{RegisterShape, StateVector, UnitaryMatrix};

/// A gate on specific wires of a block, in time order.
pub type GateStep = (Gate, Vec<usize>);

/// Register of one block: `m` wires of dimension `q`.
pub fn block_shape(p: &CodeParams) -> RegisterShape {
    RegisterShape::qudits(p.m(), p.q() as usize).expect("block fits the dimension cap")
}

/// `|S_a^k> = q^{-d/2} sum_{deg f <= d, f(0) = a} |k_1 f(alpha_1), ..., k_m f(alpha_m)>`,
/// built by enumerating polynomials.
pub fn codeword_state(a: u32, k: &SignKey, p: &CodeParams) -> Result<StateVector> {
    check_key(k, p)?;
    let shape = block_shape(p);
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    let amp = 1.0 / libm::sqrt(libm::pow(p.q() as f64, p.d() as f64));
    for f in p.polynomials_with_constant(a % p.q()) {
        let digits: Vec<usize> = p.signed_evaluations(&f, k).into_iter().map(|v| v as usize).collect();
        amps[shape.index(&digits)?] += C64::new(amp, 0.0);
    }
    StateVector::new(shape, amps)
}

pub(crate) fn check_key(k: &SignKey, p: &CodeParams) -> Result<()> {
    if k.len() != p.m() {
        return Err(Error::ShapeMismatch("sign key length differs from m".into()));
    }
    Ok(())
}

/// `D_k` as SUM powers and one multiplier, in time order. It maps
/// `|f(0), k_2 f(alpha_2), .., k_{d+1} f(alpha_{d+1}), 0^d>` to `|k_1 f(alpha_1), .., k_m f(alpha_m)>`.
pub fn interpolation_circuit(k: &SignKey, p: &CodeParams) -> Result<Vec<GateStep>> {
    check_key(k, p)?;
    let q = p.q();
    let d = p.d();
    let m = p.m();
    let h = p.h_table();
    let kf = k.as_field(q);
    let mut steps = Vec::new();
    let sum = |power: u32, from: usize, to: usize| (Gate::pow(GateTag::Sum, power), vec![from, to]);
    // fill the zero wires from the constant term, then from the other known evaluations
    for j in d + 1..m {
        steps.push(sum(mul_mod(h[0][j], kf[j], q), 0, j));
    }
    for t in 1..=d {
        for j in d + 1..m {
            steps.push(sum(mul_mod(h[t][j], mul_mod(kf[t], kf[j], q), q), t, j));
        }
    }
    // turn f(0) into k_1 f(alpha_1) on the first wire
    steps.push((Gate::new(GateTag::Mr(mul_mod(kf[0], h[0][0], q))), vec![0]));
    for t in 1..=d {
        steps.push(sum(mul_mod(h[t][0], mul_mod(kf[t], kf[0], q), q), t, 0));
    }
    steps.retain(|(g, _)| !(g.tag == GateTag::Sum && g.power == 0));
    Ok(steps)
}

/// Runs reversible classical gates (SUM powers, multipliers, X) on a digit string.
pub fn run_classical(steps: &[GateStep], digits: &mut [u32], q: u32) -> Result<()> {
    for (g, wires) in steps {
        for _ in 0..g.power {
            match g.tag {
                GateTag::Sum => digits[wires[1]] = add_mod(digits[wires[1]], digits[wires[0]], q),
                GateTag::Mr(r) => digits[wires[0]] = mul_mod(digits[wires[0]], r, q),
                GateTag::X => digits[wires[0]] = add_mod(digits[wires[0]], 1, q),
                _ => return Err(Error::UnsupportedGate(alloc::format!("{:?} is not classical", g.tag))),
            }
        }
    }
    Ok(())
}

/// Inverse gate list (reverse order, inverse powers).
pub fn invert_steps(steps: &[GateStep], q: u32) -> Vec<GateStep> {
    steps.iter().rev().map(|(g, w)| (g.inverse(q), w.clone())).collect()
}

/// `D_k` on a classical string.
pub fn dk_forward(digits: &[u32], k: &SignKey, p: &CodeParams) -> Result<Vec<u32>> {
    let mut out = digits.to_vec();
    run_classical(&interpolation_circuit(k, p)?, &mut out, p.q())?;
    Ok(out)
}

/// `D_k^dagger` on a classical string.
pub fn dk_inverse(digits: &[u32], k: &SignKey, p: &CodeParams) -> Result<Vec<u32>> {
    let mut out = digits.to_vec();
    run_classical(&invert_steps(&interpolation_circuit(k, p)?, p.q()), &mut out, p.q())?;
    Ok(out)
}

/// Dense `D_k` on one block.
pub fn build_dk(k: &SignKey, p: &CodeParams) -> Result<UnitaryMatrix> {
    let shape = block_shape(p);
    let n = shape.total_dim();
    let mut m = Matrix::zeros(n, n);
    for col in 0..n {
        let digits: Vec<u32> = shape.digits(col).into_iter().map(|v| v as u32).collect();
        let out: Vec<usize> = dk_forward(&digits, k, p)?.into_iter().map(|v| v as usize).collect();
        m[(shape.index(&out)?, col)] = C64::new(1.0, 0.0);
    }
    UnitaryMatrix::new(shape, m)
}

/// Encoder steps: Fourier on wires `1..=d`, then `D_k`.
pub fn encoder_circuit(k: &SignKey, p: &CodeParams) -> Result<Vec<GateStep>> {
    let mut steps: Vec<GateStep> = (1..=p.d()).map(|w| (Gate::new(GateTag::F), vec![w])).collect();
    steps.extend(interpolation_circuit(k, p)?);
    Ok(steps)
}

/// Applies gate steps to a state, with block wires mapped through `wires`.
pub fn apply_steps(state: &mut StateVector, steps: &[GateStep], wires: &[usize], q: u32) -> Result<()> {
    for (g, local) in steps {
        let mapped: Vec<usize> = local.iter().map(|&w| wires[w]).collect();
        state.apply(&g.matrix(q)?, &mapped)?;
    }
    Ok(())
}

/// Dense `E_k = D_k (I (x) F^{(x)d} (x) I)` on one block.
pub fn ek_matrix(k: &SignKey, p: &CodeParams) -> Result<UnitaryMatrix> {
    let shape = block_shape(p);
    let mut f_layer = UnitaryMatrix::identity(shape.clone());
    let f = Gate::new(GateTag::F).matrix(p.q())?;
    for w in 1..=p.d() {
        f_layer = f.embed(&shape, &[w])?.compose(&f_layer)?;
    }
    build_dk(k, p)?.compose(&f_layer)
}

/// `E_k (|a> (x) |0>^{m-1})` for a one-qudit input.
pub fn encode_ek(a_state: &StateVector, k: &SignKey, p: &CodeParams) -> Result<StateVector> {
    let single = RegisterShape::qudits(1, p.q() as usize)?;
    if a_state.shape() != &single {
        return Err(Error::ShapeMismatch("input must be one qudit of dimension q".into()));
    }
    let zeros = StateVector::zero(RegisterShape::qudits(p.m() - 1, p.q() as usize)?);
    let mut s = a_state.tensor(&zeros)?;
    let wires: Vec<usize> = (0..p.m()).collect();
    apply_steps(&mut s, &encoder_circuit(k, p)?, &wires, p.q())?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::field::poly_eval;

    #[test]
    fn zero_codeword_for_default_instance() {
        let p = CodeParams::default_instance();
        let s = codeword_state(0, &SignKey::ones(3), &p).unwrap();
        let amp = 1.0 / libm::sqrt(5.0);
        for b in 0..5usize {
            let a = s.amplitude(&[b, (2 * b) % 5, (3 * b) % 5]).unwrap();
            assert!((a.re - amp).abs() < 1e-12);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dk_matches_polynomial_evaluation() {
        let p = CodeParams::default_instance();
        for k in SignKey::all(3) {
            let kf = k.as_field(5);
            for a in 0..5 {
                for c in 0..5 {
                    // f with f(0) = a and f(alpha_2) = c
                    let slope = mul_mod((c + 5 - a) % 5, crate::qcore::field::inv_mod(2, 5).unwrap(), 5);
                    let f = [a, slope];
                    let input = [a, mul_mod(kf[1], c, 5), 0];
                    let out = dk_forward(&input, &k, &p).unwrap();
                    let expect: Vec<u32> = (0..3).map(|i| mul_mod(kf[i], poly_eval(&f, p.alphas()[i], 5), 5)).collect();
                    assert_eq!(out, expect);
                    assert_eq!(dk_inverse(&out, &k, &p).unwrap(), input.to_vec());
                }
            }
        }
    }

    #[test]
    fn dk_is_a_permutation() {
        let p = CodeParams::default_instance();
        let dk = build_dk(&SignKey::new(alloc::vec![1, -1, 1]).unwrap(), &p).unwrap();
        assert!(dk.matrix().data().iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0)));
        assert!(dk.matrix().unitarity_defect() < 1e-12);
    }

    #[test]
    fn encoder_matches_codewords_for_every_key() {
        let p = CodeParams::default_instance();
        let single = RegisterShape::qudits(1, 5).unwrap();
        for k in SignKey::all(3) {
            for a in 0..5 {
                let input = StateVector::basis(single.clone(), &[a]).unwrap();
                let enc = encode_ek(&input, &k, &p).unwrap();
                let oracle = codeword_state(a as u32, &k, &p).unwrap();
                assert!(enc.fidelity(&oracle) > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn dense_encoder_agrees_with_gate_application() {
        let p = CodeParams::default_instance();
        let k = SignKey::new(alloc::vec![-1, 1, -1]).unwrap();
        let ek = ek_matrix(&k, &p).unwrap();
        assert!(ek.matrix().unitarity_defect() < 1e-10);
        let col = ek.matrix().column(2 * 25);
        let oracle = codeword_state(2, &k, &p).unwrap();
        let overlap: C64 = col.iter().zip(oracle.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
    }
}
