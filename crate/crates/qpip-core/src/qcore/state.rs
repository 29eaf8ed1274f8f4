//! Pure states, density matrices and unitaries on mixed-radix registers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::linalg::{Matrix, C64, ONE, ZERO};
use super::register::RegisterShape;
use crate::error::{Error, Result};

/// Tolerance used when validating unitarity and normalization.
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    shape: RegisterShape,
    mat: Matrix,
}

impl UnitaryMatrix {
    pub fn new(shape: RegisterShape, mat: Matrix) -> Result<Self> {
        let u = Self::new_unchecked(shape, mat)?;
        let defect = u.mat.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(u)
    }

    /// Skips the unitarity check but still validates dimensions.
    pub fn new_unchecked(shape: RegisterShape, mat: Matrix) -> Result<Self> {
        let d = shape.total_dim();
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix on a register of dimension {d}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { shape, mat })
    }

    pub fn identity(shape: RegisterShape) -> Self {
        let d = shape.total_dim();
        Self {
            shape,
            mat: Matrix::identity(d),
        }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            mat: self.mat.adjoint(),
        }
    }

    /// `self * rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.shape != rhs.shape {
            return Err(Error::ShapeMismatch("composing unitaries on different registers".into()));
        }
        Ok(Self {
            shape: self.shape.clone(),
            mat: self.mat.mul(&rhs.mat),
        })
    }

    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            shape: self.shape.concat(&rhs.shape)?,
            mat: self.mat.kron(&rhs.mat),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.shape.clone());
        for _ in 0..k {
            acc.mat = self.mat.mul(&acc.mat);
        }
        acc
    }

    /// Full-register matrix of this unitary acting on `wires` of `outer`.
    pub fn embed(&self, outer: &RegisterShape, wires: &[usize]) -> Result<Self> {
        let d = outer.total_dim();
        let mut cols = Matrix::identity(d);
        apply_matrix_columns(&mut cols, outer, &self.mat, &self.shape, wires)?;
        Ok(Self {
            shape: outer.clone(),
            mat: cols,
        })
    }
}

/// Precomputed index tables for acting on a subset of wires.
struct WirePlan {
    local: Vec<usize>,
    bases: Vec<usize>,
}

impl WirePlan {
    fn new(shape: &RegisterShape, op_shape: &RegisterShape, wires: &[usize]) -> Result<Self> {
        let sub = shape.select(wires)?;
        if sub.dims() != op_shape.dims() {
            return Err(Error::ShapeMismatch(format!(
                "operator on dims {:?} applied to wires with dims {:?}",
                op_shape.dims(),
                sub.dims()
            )));
        }
        let rest = shape.complement(wires);
        Ok(Self {
            local: shape.local_offsets(wires),
            bases: shape.local_offsets(&rest),
        })
    }

    /// Applies `u` to every fibre of `buf`, with flat index `(base + off) * step + shift`.
    fn apply(&self, buf: &mut [C64], u: &Matrix, step: usize, shift: usize, conj: bool) {
        let k = self.local.len();
        let mut tmp = vec![ZERO; k];
        for &b in &self.bases {
            for (t, &o) in tmp.iter_mut().zip(&self.local) {
                *t = buf[(b + o) * step + shift];
            }
            for r in 0..k {
                let row = u.row(r);
                let mut acc = ZERO;
                for (x, t) in row.iter().zip(&tmp) {
                    if *t != ZERO {
                        acc += if conj { x.conj() * t } else { x * t };
                    }
                }
                buf[(b + self.local[r]) * step + shift] = acc;
            }
        }
    }
}

fn apply_matrix_columns(
    m: &mut Matrix,
    shape: &RegisterShape,
    u: &Matrix,
    u_shape: &RegisterShape,
    wires: &[usize],
) -> Result<()> {
    let plan = WirePlan::new(shape, u_shape, wires)?;
    let d = m.cols();
    for c in 0..d {
        plan.apply(m.data_mut(), u, d, c, false);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    shape: RegisterShape,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(shape: RegisterShape, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                shape.total_dim()
            )));
        }
        Ok(Self { shape, amps })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(shape: RegisterShape, amps: Vec<C64>) -> Result<Self> {
        let mut s = Self::new(shape, amps)?;
        s.normalize()?;
        Ok(s)
    }

    pub fn basis(shape: RegisterShape, digits: &[usize]) -> Result<Self> {
        let idx = shape.index(digits)?;
        let mut amps = vec![ZERO; shape.total_dim()];
        amps[idx] = ONE;
        Ok(Self { shape, amps })
    }

    pub fn zero(shape: RegisterShape) -> Self {
        let mut amps = vec![ZERO; shape.total_dim()];
        amps[0] = ONE;
        Self { shape, amps }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amps[self.shape.index(digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = libm::sqrt(self.norm_sqr());
        if n < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let shape = self.shape.concat(&other.shape)?;
        let mut amps = Vec::with_capacity(shape.total_dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { shape, amps })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape.clone(),
            mat: Matrix::outer(&self.amps, &self.amps),
        }
    }

    pub fn apply(&mut self, u: &UnitaryMatrix, wires: &[usize]) -> Result<()> {
        apply_on_wires(self, u, wires)
    }

    /// Applies an arbitrary (not necessarily unitary) operator to `wires`.
    pub fn apply_operator(&mut self, op: &Matrix, op_shape: &RegisterShape, wires: &[usize]) -> Result<()> {
        let plan = WirePlan::new(&self.shape, op_shape, wires)?;
        if op.rows() != op_shape.total_dim() || op.cols() != op_shape.total_dim() {
            return Err(Error::ShapeMismatch("operator dimension".into()));
        }
        plan.apply(&mut self.amps, op, 1, 0, false);
        Ok(())
    }

    /// Outcome distribution of a standard-basis measurement of `wires`, indexed
    /// by the local flat index.
    pub fn probabilities(&self, wires: &[usize]) -> Result<Vec<f64>> {
        let sub = self.shape.select(wires)?;
        let rest = self.shape.complement(wires);
        let local = self.shape.local_offsets(wires);
        let bases = self.shape.local_offsets(&rest);
        let mut probs = vec![0.0; sub.total_dim()];
        for (k, &o) in local.iter().enumerate() {
            probs[k] = bases.iter().map(|&b| self.amps[b + o].norm_sqr()).sum();
        }
        Ok(probs)
    }

    /// Projects `wires` onto the basis outcome; returns its probability and the
    /// renormalized post-measurement state.
    pub fn project(&self, wires: &[usize], outcome: &[usize]) -> Result<(f64, StateVector)> {
        let sub = self.shape.select(wires)?;
        let k = sub.index(outcome)?;
        let local = self.shape.local_offsets(wires);
        let mut amps = vec![ZERO; self.amps.len()];
        let rest = self.shape.complement(wires);
        for b in self.shape.local_offsets(&rest) {
            let i = b + local[k];
            amps[i] = self.amps[i];
        }
        let mut post = StateVector {
            shape: self.shape.clone(),
            amps,
        };
        let p = post.norm_sqr();
        post.normalize()?;
        Ok((p, post))
    }

    /// Amplitudes of the remaining wires given a fixed outcome on `wires`
    /// (unnormalized, register with those wires removed).
    pub fn slice(&self, wires: &[usize], outcome: &[usize]) -> Result<StateVector> {
        let sub = self.shape.select(wires)?;
        let k = sub.index(outcome)?;
        let rest = self.shape.complement(wires);
        let rest_shape = self.shape.select(&rest)?;
        let off = self.shape.local_offsets(wires)[k];
        let amps = self.shape.local_offsets(&rest).iter().map(|&b| self.amps[b + off]).collect();
        StateVector::new(rest_shape, amps)
    }
}

/// Applies `u` to the listed wires of `state` in place.
pub fn apply_on_wires(state: &mut StateVector, u: &UnitaryMatrix, wires: &[usize]) -> Result<()> {
    let plan = WirePlan::new(&state.shape, &u.shape, wires)?;
    plan.apply(&mut state.amps, &u.mat, 1, 0, false);
    Ok(())
}

/// Samples a standard-basis measurement of `wires`; returns the digits and the
/// collapsed state.
pub fn measure_wires<R: Rng + ?Sized>(
    state: &StateVector,
    wires: &[usize],
    rng: &mut R,
) -> Result<(Vec<usize>, StateVector)> {
    let probs = state.probabilities(wires)?;
    let k = sample_index(&probs, rng);
    let sub = state.shape.select(wires)?;
    let digits = sub.digits(k);
    let (_, post) = state.project(wires, &digits)?;
    Ok((digits, post))
}

/// Draws an index from unnormalized nonnegative weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = i;
        if u < w {
            return i;
        }
        u -= w;
    }
    last
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    shape: RegisterShape,
    mat: Matrix,
}

impl DensityMatrix {
    pub fn new(shape: RegisterShape, mat: Matrix) -> Result<Self> {
        let d = shape.total_dim();
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::ShapeMismatch("density matrix dimension".into()));
        }
        Ok(Self { shape, mat })
    }

    pub fn maximally_mixed(shape: RegisterShape) -> Self {
        let d = shape.total_dim();
        let mat = Matrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { shape, mat }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Matrix {
        &mut self.mat
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr(P rho)` for an operator on the full register.
    pub fn expectation(&self, op: &Matrix) -> C64 {
        let d = self.mat.rows();
        let mut acc = ZERO;
        for r in 0..d {
            for c in 0..d {
                acc += op[(r, c)] * self.mat[(c, r)];
            }
        }
        acc
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            shape: self.shape.concat(&other.shape)?,
            mat: self.mat.kron(&other.mat),
        })
    }

    /// `rho -> U rho U^dagger` with `U` on `wires`.
    pub fn apply(&mut self, u: &UnitaryMatrix, wires: &[usize]) -> Result<()> {
        self.apply_operator(u.matrix(), u.shape(), wires)
    }

    /// `rho -> A rho A^dagger` for any operator `A` on `wires`.
    pub fn apply_operator(&mut self, a: &Matrix, a_shape: &RegisterShape, wires: &[usize]) -> Result<()> {
        let plan = WirePlan::new(&self.shape, a_shape, wires)?;
        let d = self.mat.rows();
        for c in 0..d {
            plan.apply(self.mat.data_mut(), a, d, c, false);
        }
        for r in 0..d {
            plan.apply(self.mat.data_mut(), a, 1, r * d, true);
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &Self, weight: f64) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("adding density matrices on different registers".into()));
        }
        self.mat.add_assign_scaled(&other.mat, C64::new(weight, 0.0));
        Ok(())
    }

    pub fn scaled(&self, weight: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            mat: self.mat.scale(C64::new(weight, 0.0)),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            mat: Matrix::zeros(self.mat.rows(), self.mat.cols()),
        }
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        trace_distance(self, other)
    }
}

/// Reduced state on `keep` (in the listed order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let kept = rho.shape.select(keep)?;
    let traced = rho.shape.complement(keep);
    let k_off = rho.shape.local_offsets(keep);
    let t_off = rho.shape.local_offsets(&traced);
    let dk = kept.total_dim();
    let d = rho.mat.rows();
    let mut out = Matrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = ZERO;
            for &t in &t_off {
                acc += rho.mat.data()[(k_off[r] + t) * d + k_off[c] + t];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix { shape: kept, mat: out })
}

/// `(1/2) || rho - sigma ||_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.shape != sigma.shape {
        return Err(Error::ShapeMismatch("trace distance across registers".into()));
    }
    let diff = rho.mat.sub(&sigma.mat);
    Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
}

/// Kronecker product of two states on concatenated registers.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::rng::seeded;

    fn h() -> UnitaryMatrix {
        let s = 1.0 / libm::sqrt(2.0);
        let m = Matrix::from_vec(2, 2, vec![C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]).unwrap();
        UnitaryMatrix::new(RegisterShape::qubits(1).unwrap(), m).unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Matrix::from_vec(1, 1, vec![C64::new(2.0, 0.0)]);
        let shape = RegisterShape::new(vec![2]).unwrap();
        assert!(UnitaryMatrix::new(shape, m.unwrap()).is_err());
    }

    #[test]
    fn apply_matches_embedding() {
        let shape = RegisterShape::new(vec![2, 3, 2]).unwrap();
        let mut rng = seeded(3);
        let psi = crate::qcore::rng::random_state(shape.clone(), &mut rng);
        let u = h().tensor(&h()).unwrap();
        let mut a = psi.clone();
        a.apply(&u, &[2, 0]).unwrap();
        let full = u.embed(&shape, &[2, 0]).unwrap();
        let b = full.matrix().mul_vec(psi.amplitudes());
        for (x, y) in a.amplitudes().iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn measurement_of_plus_state_is_balanced() {
        let mut psi = StateVector::zero(RegisterShape::qubits(1).unwrap());
        psi.apply(&h(), &[0]).unwrap();
        let p = psi.probabilities(&[0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        let mut rng = seeded(9);
        let (d, post) = measure_wires(&psi, &[0], &mut rng).unwrap();
        assert_eq!(post.amplitude(&d).unwrap().norm(), 1.0);
    }

    #[test]
    fn projection_onto_impossible_outcome_fails() {
        let psi = StateVector::zero(RegisterShape::qubits(2).unwrap());
        assert_eq!(psi.project(&[1], &[1]).unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_mixed() {
        let shape = RegisterShape::qubits(2).unwrap();
        let s = 1.0 / libm::sqrt(2.0);
        let bell = StateVector::new(shape, vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        let red = partial_trace(&bell.to_density(), &[1]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(RegisterShape::qubits(1).unwrap());
        assert!(trace_distance(&red, &mixed).unwrap() < 1e-12);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let shape = RegisterShape::qubits(1).unwrap();
        let a = StateVector::basis(shape.clone(), &[0]).unwrap().to_density();
        let b = StateVector::basis(shape, &[1]).unwrap().to_density();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_apply_matches_pure_evolution() {
        let shape = RegisterShape::new(vec![3, 2]).unwrap();
        let mut rng = seeded(1);
        let psi = crate::qcore::rng::random_state(shape.clone(), &mut rng);
        let mut rho = psi.to_density();
        rho.apply(&h(), &[1]).unwrap();
        let mut phi = psi.clone();
        phi.apply(&h(), &[1]).unwrap();
        assert!(rho.matrix().max_abs_diff(phi.to_density().matrix()) < 1e-12);
    }
}
