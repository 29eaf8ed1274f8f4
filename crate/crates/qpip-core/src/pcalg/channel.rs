//! Group-averaged (twirled) attack channels and their closed forms.

use alloc::vec::Vec;

use super::clifford::CliffordGroup;
use super::pauli::{pauli_components, SymbolicPauli};
use crate::error::{Error, Result};
use crate::qcore::linalg::Matrix;
use crate::qcore::{DensityMatrix, RegisterShape, UnitaryMatrix};

/// Group over which an attack is conjugated.
#[derive(Clone, Copy, Debug)]
pub enum AveragingGroup<'a> {
    Clifford(&'a CliffordGroup),
    Pauli { q: u32 },
}

/// `(1/|G|) sum_g (g^dagger (x) I) U (g (x) I) rho (g^dagger (x) I) U^dagger (g (x) I)`,
/// with `g` acting on `wires` and `U` on the whole register.
pub fn group_average_channel(
    rho: &DensityMatrix,
    attack: &UnitaryMatrix,
    group: AveragingGroup<'_>,
    wires: &[usize],
) -> Result<DensityMatrix> {
    let all: Vec<usize> = (0..rho.shape().num_wires()).collect();
    let mut acc = rho.zeros_like();
    let mut step = |g: &UnitaryMatrix| -> Result<()> {
        let mut s = rho.clone();
        s.apply(g, wires)?;
        s.apply(attack, &all)?;
        s.apply(&g.adjoint(), wires)?;
        acc.add_scaled(&s, 1.0)
    };
    let count = match group {
        AveragingGroup::Clifford(table) => {
            if table.num_qubits() != wires.len() {
                return Err(Error::ShapeMismatch("Clifford table does not match the twirled wires".into()));
            }
            for e in table.elements() {
                step(e.matrix())?;
            }
            table.len()
        }
        AveragingGroup::Pauli { q } => {
            let mut count = 0;
            for p in SymbolicPauli::all(q, wires.len()) {
                step(&p.matrix())?;
                count += 1;
            }
            count
        }
    };
    Ok(acc.scaled(1.0 / count as f64))
}

/// Splits `attack` as `sum_P P (x) U_P` over `wires`; the environment operators
/// act on the complement wires in increasing order.
fn components(
    rho: &DensityMatrix,
    attack: &UnitaryMatrix,
    wires: &[usize],
) -> Result<(Vec<(SymbolicPauli, Matrix)>, RegisterShape, Vec<usize>)> {
    if attack.shape() != rho.shape() {
        return Err(Error::ShapeMismatch("attack and state registers differ".into()));
    }
    let comps = pauli_components(attack.matrix(), rho.shape(), wires)?;
    let env = rho.shape().complement(wires);
    let env_shape = rho.shape().select(&env)?;
    Ok((comps, env_shape, env))
}

/// Closed form of the Pauli twirl: `sum_P (P (x) U_P) rho (P (x) U_P)^dagger`.
pub fn pauli_twirl_formula(rho: &DensityMatrix, attack: &UnitaryMatrix, wires: &[usize]) -> Result<DensityMatrix> {
    let (comps, env_shape, env) = components(rho, attack, wires)?;
    let mut acc = rho.zeros_like();
    for (p, up) in &comps {
        let mut s = rho.clone();
        s.apply_operator(up, &env_shape, &env)?;
        let s = p.conjugate_density(&s, wires)?;
        acc.add_scaled(&s, 1.0)?;
    }
    Ok(acc)
}

/// Closed form of the qubit Clifford twirl:
/// `U_I rho U_I^dagger + (4^n - 1)^{-1} sum_{P != I} P [sum_{P' != I} U_P' rho U_P'^dagger] P^dagger`.
pub fn clifford_twirl_formula(rho: &DensityMatrix, attack: &UnitaryMatrix, wires: &[usize]) -> Result<DensityMatrix> {
    let (comps, env_shape, env) = components(rho, attack, wires)?;
    if comps[0].0.q() != 2 {
        return Err(Error::ShapeMismatch("the Clifford twirl is defined on qubits".into()));
    }
    let mut ident = rho.clone();
    ident.apply_operator(&comps[0].1, &env_shape, &env)?;
    let mut inner = rho.zeros_like();
    for (_, up) in comps.iter().skip(1) {
        let mut s = rho.clone();
        s.apply_operator(up, &env_shape, &env)?;
        inner.add_scaled(&s, 1.0)?;
    }
    let weight = 1.0 / (comps.len() - 1) as f64;
    let mut acc = ident;
    for (p, _) in comps.iter().skip(1) {
        acc.add_scaled(&p.conjugate_density(&inner, wires)?, weight)?;
    }
    Ok(acc)
}
