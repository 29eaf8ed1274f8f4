//! Paulis that act logically on the code for a given sign key, and the split of
//! any other Pauli into a logical part and a detectable remainder.

use alloc::vec::Vec;

use super::params::{CodeParams, SignKey};
use crate::error::{Error, Result};
use crate::pcalg::pauli::SymbolicPauli;
use crate::qcore::field::{inv_mod, lagrange_interpolate, mul_mod, poly_eval};

/// Polynomial through the points `(alpha_i, values_i)` for the listed indices.
fn interpolate_at(p: &CodeParams, idx: &[usize], values: &[u32]) -> Result<Vec<u32>> {
    let xs: Vec<u32> = idx.iter().map(|&i| p.alphas()[i]).collect();
    let ys: Vec<u32> = idx.iter().map(|&i| values[i]).collect();
    lagrange_interpolate(&xs, &ys, p.q())
}

/// Unsigned x values `k_i x_i` and z values `(c_i k_i)^{-1} z_i`; a Pauli is
/// correlated iff both are evaluations of degree-`<= d` polynomials.
fn unsigned_parts(op: &SymbolicPauli, k: &SignKey, p: &CodeParams) -> Result<(Vec<u32>, Vec<u32>)> {
    if op.q() != p.q() || op.num_wires() != p.m() || k.len() != p.m() {
        return Err(Error::ShapeMismatch("Pauli, sign key and code size differ".into()));
    }
    let q = p.q();
    let kf = k.as_field(q);
    let fx = (0..p.m()).map(|i| mul_mod(kf[i], op.x()[i], q)).collect();
    let gz = (0..p.m())
        .map(|i| Ok(mul_mod(inv_mod(mul_mod(kf[i], p.interp_c()[i], q), q)?, op.z()[i], q)))
        .collect::<Result<Vec<_>>>()?;
    Ok((fx, gz))
}

fn low_degree(values: &[u32], p: &CodeParams) -> Result<Option<Vec<u32>>> {
    let first: Vec<usize> = (0..=p.d()).collect();
    let f = interpolate_at(p, &first, values)?;
    let ok = (p.d() + 1..p.m()).all(|i| poly_eval(&f, p.alphas()[i], p.q()) == values[i]);
    Ok(ok.then_some(f))
}

/// `Some((f(0), g(0)))` when the operator acts on the code as logical
/// `Z^{g(0)} X^{f(0)}`, `None` otherwise.
pub fn logical_action(op: &SymbolicPauli, k: &SignKey, p: &CodeParams) -> Result<Option<(u32, u32)>> {
    let (fx, gz) = unsigned_parts(op, k, p)?;
    match (low_degree(&fx, p)?, low_degree(&gz, p)?) {
        (Some(f), Some(g)) => Ok(Some((f[0], g[0]))),
        _ => Ok(None),
    }
}

/// Whether a non-identity Pauli is correlated with sign key `k`: its x part is
/// `(k_i f(alpha_i))` and its z part `(c_i k_i g(alpha_i))` for `deg f, g <= d`.
pub fn is_k_correlated(op: &SymbolicPauli, k: &SignKey, p: &CodeParams) -> Result<bool> {
    if op.is_identity() {
        return Err(Error::IdentityPauli);
    }
    Ok(logical_action(op, k, p)?.is_some())
}

/// Splits an uncorrelated Pauli as `q_unc * q_corr` (up to phase), where
/// `q_corr` is correlated and `q_unc` has the form
/// `I (x) Z^{z_2..z_{d+1}} (x) X^{x_{d+2}..x_m}`.
pub fn decompose_correlated(
    op: &SymbolicPauli,
    k: &SignKey,
    p: &CodeParams,
) -> Result<(SymbolicPauli, SymbolicPauli)> {
    if is_k_correlated(op, k, p)? {
        return Err(Error::AlreadyCorrelated);
    }
    let q = p.q();
    let (fx, gz) = unsigned_parts(op, k, p)?;
    let d = p.d();
    let m = p.m();
    let x_nodes: Vec<usize> = (0..=d).collect();
    let mut z_nodes = alloc::vec![0usize];
    z_nodes.extend(d + 1..m);
    let f = interpolate_at(p, &x_nodes, &fx)?;
    let g = interpolate_at(p, &z_nodes, &gz)?;
    let kf = k.as_field(q);
    let x: Vec<u32> = (0..m).map(|i| mul_mod(kf[i], poly_eval(&f, p.alphas()[i], q), q)).collect();
    let z: Vec<u32> = (0..m)
        .map(|i| mul_mod(mul_mod(kf[i], p.interp_c()[i], q), poly_eval(&g, p.alphas()[i], q), q))
        .collect();
    let corr = SymbolicPauli::new(q, x, z)?;
    let unc = op.difference(&corr)?;
    Ok((corr, unc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycode::encode::codeword_state;

    fn brute_force_correlated(op: &SymbolicPauli, k: &SignKey, p: &CodeParams) -> bool {
        // every candidate pair of polynomials, no interpolation
        let q = p.q();
        let kf = k.as_field(q);
        let mut x_ok = false;
        let mut z_ok = false;
        for a in 0..q {
            for f in p.polynomials_with_constant(a) {
                let ev: Vec<u32> = p.alphas().iter().map(|&al| poly_eval(&f, al, q)).collect();
                if (0..p.m()).all(|i| mul_mod(kf[i], ev[i], q) == op.x()[i]) {
                    x_ok = true;
                }
                if (0..p.m()).all(|i| mul_mod(mul_mod(kf[i], p.interp_c()[i], q), ev[i], q) == op.z()[i]) {
                    z_ok = true;
                }
            }
        }
        x_ok && z_ok
    }

    #[test]
    fn interpolation_test_matches_enumeration() {
        let p = CodeParams::default_instance();
        for k in [SignKey::ones(3), SignKey::new(alloc::vec![1, -1, 1]).unwrap()] {
            for idx in (1..15625).step_by(7) {
                let op = SymbolicPauli::from_index(5, 3, idx);
                assert_eq!(is_k_correlated(&op, &k, &p).unwrap(), brute_force_correlated(&op, &k, &p));
            }
        }
    }

    #[test]
    fn logical_x_footprint_is_correlated() {
        let p = CodeParams::default_instance();
        let k = SignKey::new(alloc::vec![-1, -1, 1]).unwrap();
        let op = SymbolicPauli::new(5, k.as_field(5), alloc::vec![0; 3]).unwrap();
        assert_eq!(logical_action(&op, &k, &p).unwrap(), Some((1, 0)));
        let shift = SymbolicPauli::new(5, alloc::vec![1, 0, 0], alloc::vec![0; 3]).unwrap();
        for key in SignKey::all(3) {
            assert!(!is_k_correlated(&shift, &key, &p).unwrap());
        }
        assert_eq!(is_k_correlated(&SymbolicPauli::identity(5, 3), &k, &p), Err(Error::IdentityPauli));
    }

    #[test]
    fn decomposition_shape() {
        let p = CodeParams::default_instance();
        let k = SignKey::ones(3);
        let op = SymbolicPauli::new(5, alloc::vec![1, 0, 0], alloc::vec![2, 0, 1]).unwrap();
        let (corr, unc) = decompose_correlated(&op, &k, &p).unwrap();
        assert!(is_k_correlated(&corr, &k, &p).unwrap());
        assert_eq!(unc.x()[0], 0);
        assert_eq!(unc.x()[1], 0);
        assert_eq!(unc.z()[0], 0);
        assert_eq!(unc.z()[2], 0);
        assert_ne!(unc.x()[2], 0);
        assert_eq!(unc.compose(&corr).unwrap(), op);
        // the remainder moves every codeword off the code space
        for a in 0..5 {
            let mut s = codeword_state(a, &k, &p).unwrap();
            unc.apply_to(&mut s, &[0, 1, 2]).unwrap();
            for b in 0..5 {
                assert!(codeword_state(b, &k, &p).unwrap().fidelity(&s) < 1e-20);
            }
        }
    }

    fn has_common_zero(op: &SymbolicPauli) -> bool {
        (0..op.num_wires()).any(|i| op.x()[i] == 0 && op.z()[i] == 0)
    }

    #[test]
    fn two_keys_unless_an_evaluation_vanishes() {
        // A coordinate where both parts vanish leaves that sign free, so
        // such Paulis are correlated for 4 keys. Count from offline enumeration.
        let p = CodeParams::default_instance();
        let keys: Vec<SignKey> = SignKey::all(3).collect();
        let mut four = 0;
        for idx in 1..15625 {
            let op = SymbolicPauli::from_index(5, 3, idx);
            let hits: Vec<&SignKey> = keys.iter().filter(|k| is_k_correlated(&op, k, &p).unwrap()).collect();
            assert!(hits.len() <= 4 && hits.len() % 2 == 0);
            for k in &hits {
                assert!(hits.contains(&&k.negated()));
            }
            if hits.len() > 2 {
                assert!(has_common_zero(&op));
                four += 1;
            }
        }
        assert_eq!(four, 144);
        let op = SymbolicPauli::new(5, alloc::vec![1, 2, 0], alloc::vec![3, 4, 0]).unwrap();
        let hits = keys.iter().filter(|k| is_k_correlated(&op, k, &p).unwrap()).count();
        assert_eq!(hits, 4);
    }

    #[test]
    fn equal_signed_evaluations_force_related_keys() {
        let p = CodeParams::default_instance();
        let keys: Vec<SignKey> = SignKey::all(3).collect();
        let polys: Vec<Vec<u32>> = (0..5).flat_map(|a| p.polynomials_with_constant(a)).collect();
        for k in &keys {
            for kh in &keys {
                for f in polys.iter().filter(|f| f.iter().any(|&c| c != 0)) {
                    let target = p.signed_evaluations(f, k);
                    for fh in &polys {
                        if p.signed_evaluations(fh, kh) != target {
                            continue;
                        }
                        // keys may only disagree with the sign pattern where the evaluation is zero
                        let same = (0..3).all(|i| target[i] == 0 || k.signs()[i] == kh.signs()[i]);
                        let opposite = (0..3).all(|i| target[i] == 0 || k.signs()[i] == -kh.signs()[i]);
                        assert!(same || opposite);
                        if kh != k && *kh != k.negated() {
                            assert!(target.contains(&0));
                        }
                    }
                }
            }
        }
    }

    /// Dense oracle: the Pauli maps every codeword into the code space.
    fn preserves_code(op: &SymbolicPauli, k: &SignKey, p: &CodeParams) -> bool {
        let words: Vec<_> = (0..5).map(|a| codeword_state(a, k, p).unwrap()).collect();
        words.iter().all(|w| {
            let mut s = w.clone();
            op.apply_to(&mut s, &[0, 1, 2]).unwrap();
            let kept: f64 = words.iter().map(|v| v.fidelity(&s)).sum();
            (kept - 1.0).abs() < 1e-9
        })
    }

    #[test]
    fn structural_test_matches_dense_semantics() {
        let p = CodeParams::default_instance();
        for k in [SignKey::ones(3), SignKey::new(alloc::vec![1, 1, -1]).unwrap()] {
            for idx in (1..15625).step_by(97) {
                let op = SymbolicPauli::from_index(5, 3, idx);
                assert_eq!(is_k_correlated(&op, &k, &p).unwrap(), preserves_code(&op, &k, &p), "{idx}");
            }
            let lx = SymbolicPauli::new(5, k.as_field(5), alloc::vec![0; 3]).unwrap();
            assert!(preserves_code(&lx, &k, &p));
        }
    }

    proptest::proptest! {
        #[test]
        fn decomposition_recomposes(idx in 1usize..15625, bits in 0usize..8) {
            let p = CodeParams::default_instance();
            let k = SignKey::all(3).nth(bits).unwrap();
            let op = SymbolicPauli::from_index(5, 3, idx);
            if is_k_correlated(&op, &k, &p).unwrap() {
                proptest::prop_assert_eq!(decompose_correlated(&op, &k, &p), Err(Error::AlreadyCorrelated));
            } else {
                let (corr, unc) = decompose_correlated(&op, &k, &p).unwrap();
                proptest::prop_assert!(corr.is_identity() || is_k_correlated(&corr, &k, &p).unwrap());
                proptest::prop_assert!(!unc.is_identity());
                proptest::prop_assert_eq!(unc.x()[0], 0);
                proptest::prop_assert_eq!(unc.z()[0], 0);
                proptest::prop_assert_eq!(unc.x()[1], 0);
                proptest::prop_assert_eq!(unc.z()[2], 0);
                proptest::prop_assert_eq!(unc.compose(&corr).unwrap(), op);
            }
        }
    }
}
