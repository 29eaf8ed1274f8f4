//! Clifford-based quantum authentication: encode with a random Clifford on
//! message plus `e` zero auxiliaries, decode by inverting and checking the
//! auxiliaries.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcalg::channel::{group_average_channel, AveragingGroup};
use crate::pcalg::clifford::{sample_clifford, CliffordElement, CliffordGroup, MAX_ENUMERATED_QUBITS, MAX_SAMPLED_QUBITS};
use crate::pcalg::pauli::{pauli_components, SymbolicPauli};
use crate::qcore::linalg::{Matrix, C64};
use crate::qcore::state::measure_wires;
use crate::qcore::{DensityMatrix, RegisterShape, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordQasParams {
    /// Message qubits.
    pub l: usize,
    /// Auxiliary qubits.
    pub e: usize,
}

impl CliffordQasParams {
    pub fn new(l: usize, e: usize) -> Result<Self> {
        if l == 0 || e == 0 {
            return Err(Error::InvalidParameter("need at least one message and one auxiliary qubit".into()));
        }
        if l + e > MAX_SAMPLED_QUBITS {
            return Err(Error::UnsupportedCliffordSize(l + e));
        }
        Ok(Self { l, e })
    }

    pub fn m(&self) -> usize {
        self.l + self.e
    }

    /// Stated security parameter `2^{-e}`.
    pub fn epsilon(&self) -> f64 {
        libm::pow(2.0, -(self.e as f64))
    }

    fn aux_wires(&self) -> Vec<usize> {
        (self.l..self.m()).collect()
    }
}

/// A key is a Clifford on all `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordKey {
    pub element: CliffordElement,
}

impl CliffordKey {
    pub fn new(element: CliffordElement) -> Self {
        Self { element }
    }

    pub fn random<R: Rng + ?Sized>(params: &CliffordQasParams, rng: &mut R) -> Result<Self> {
        Ok(Self::new(sample_clifford(params.m(), rng)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Abort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub verdict: Verdict,
    pub message: Option<StateVector>,
}

/// The acceptance projectors for a pure message `psi` with zero auxiliaries:
/// `pi0 = (I - |psi><psi|) (x) |0><0|` and `pi1 = I - pi0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QasProjectors {
    pub psi: StateVector,
    pub pi1: Matrix,
    pub pi0: Matrix,
}

impl QasProjectors {
    pub fn new(psi: &StateVector, aux: &RegisterShape) -> Result<Self> {
        let dm = psi.shape().total_dim();
        let da = aux.total_dim();
        let good = Matrix::outer(psi.amplitudes(), psi.amplitudes());
        let bad = Matrix::identity(dm).sub(&good);
        let mut zero = Matrix::zeros(da, da);
        zero[(0, 0)] = C64::new(1.0, 0.0);
        let pi0 = bad.kron(&zero);
        let pi1 = Matrix::identity(dm * da).sub(&pi0);
        Ok(Self {
            psi: psi.clone(),
            pi1,
            pi0,
        })
    }

    /// The honest decoded state `|psi><psi| (x) |0><0|`.
    pub fn reference(&self, aux: &RegisterShape) -> Result<DensityMatrix> {
        let zero = StateVector::zero(aux.clone());
        Ok(self.psi.tensor(&zero)?.to_density())
    }
}

/// `C_k (|psi> (x) |0>^e)`.
pub fn cqas_encode(psi: &StateVector, key: &CliffordKey, params: &CliffordQasParams) -> Result<StateVector> {
    check_message(psi, params)?;
    check_key(key, params)?;
    let aux = StateVector::zero(RegisterShape::qubits(params.e)?);
    let mut s = psi.tensor(&aux)?;
    let wires: Vec<usize> = (0..params.m()).collect();
    s.apply(key.element.matrix(), &wires)?;
    Ok(s)
}

/// Inverts the key, measures the auxiliaries and returns the message when they
/// all read zero.
pub fn cqas_decode<R: Rng + ?Sized>(
    state: &StateVector,
    key: &CliffordKey,
    params: &CliffordQasParams,
    rng: &mut R,
) -> Result<DecodeOutcome> {
    check_key(key, params)?;
    if state.shape() != &RegisterShape::qubits(params.m())? {
        return Err(Error::ShapeMismatch("received register is not m qubits".into()));
    }
    let mut s = state.clone();
    let wires: Vec<usize> = (0..params.m()).collect();
    s.apply(&key.element.matrix().adjoint(), &wires)?;
    let aux = params.aux_wires();
    let (digits, post) = measure_wires(&s, &aux, rng)?;
    if digits.iter().any(|&d| d != 0) {
        return Ok(DecodeOutcome {
            verdict: Verdict::Abort,
            message: None,
        });
    }
    let mut msg = post.slice(&aux, &digits)?;
    msg.normalize()?;
    Ok(DecodeOutcome {
        verdict: Verdict::Valid,
        message: Some(msg),
    })
}

fn check_message(psi: &StateVector, params: &CliffordQasParams) -> Result<()> {
    if psi.shape() != &RegisterShape::qubits(params.l)? {
        return Err(Error::ShapeMismatch("message is not l qubits".into()));
    }
    Ok(())
}

fn check_key(key: &CliffordKey, params: &CliffordQasParams) -> Result<()> {
    if key.element.num_qubits() != params.m() {
        return Err(Error::ShapeMismatch("key acts on the wrong number of qubits".into()));
    }
    Ok(())
}

/// How Bob's state is averaged over keys.
pub enum KeyAverage<'a, R: Rng + ?Sized> {
    /// Every element of the enumerated group (requires `m <= 2`).
    Exact(&'a CliffordGroup),
    /// Monte-Carlo over uniformly sampled keys.
    Sampled { rng: &'a mut R, trials: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityRecord {
    /// `Tr(pi1 rho_B)`.
    pub tr_pi1: f64,
    /// `Tr(pi0 rho_B)`.
    pub tr_pi0: f64,
    /// Weight of the identity component of the attack, `Tr(U_I rho_E U_I^dagger)`.
    pub s: f64,
    /// The stated security parameter.
    pub epsilon: f64,
    /// The bound `tr_pi0` is checked against.
    pub bound: f64,
    /// Largest entry deviation from the closed two-term form (exact mode only).
    pub form_residual: Option<f64>,
    /// Number of keys averaged.
    pub keys: usize,
}

impl SecurityRecord {
    pub fn within_bound(&self, tol: f64) -> bool {
        self.tr_pi0 <= self.bound + tol
    }
}

/// Bob's decoded state averaged over keys, with the attack acting on the
/// encoded register (wires `0..m`) and the environment (remaining wires).
pub fn cqas_security_experiment<R: Rng + ?Sized>(
    params: &CliffordQasParams,
    psi: &StateVector,
    attack: &crate::qcore::UnitaryMatrix,
    env_state: &DensityMatrix,
    mode: KeyAverage<'_, R>,
) -> Result<SecurityRecord> {
    check_message(psi, params)?;
    let m = params.m();
    let aux_shape = RegisterShape::qubits(params.e)?;
    let proj = QasProjectors::new(psi, &aux_shape)?;
    let rho = proj.reference(&aux_shape)?;
    let joint = rho.tensor(env_state)?;
    if attack.shape() != joint.shape() {
        return Err(Error::ShapeMismatch("attack must act on the m encoded qubits plus the environment".into()));
    }
    let code_wires: Vec<usize> = (0..m).collect();
    let comps = pauli_components(attack.matrix(), joint.shape(), &code_wires)?;
    let env_wires = joint.shape().complement(&code_wires);
    let env_shape = joint.shape().select(&env_wires)?;
    let mut ident_env = env_state.clone();
    ident_env.apply_operator(&comps[0].1, &env_shape, &(0..env_wires.len()).collect::<Vec<_>>())?;
    let s = ident_env.trace();

    let (rho_b, keys, exact) = match mode {
        KeyAverage::Exact(group) => {
            if m > MAX_ENUMERATED_QUBITS || group.num_qubits() != m {
                return Err(Error::UnsupportedCliffordSize(m));
            }
            let avg = group_average_channel(&joint, attack, AveragingGroup::Clifford(group), &code_wires)?;
            (avg.partial_trace(&code_wires)?, group.len(), true)
        }
        KeyAverage::Sampled { rng, trials } => {
            let mut acc = DensityMatrix::new(rho.shape().clone(), Matrix::zeros(rho.matrix().rows(), rho.matrix().cols()))?;
            let all: Vec<usize> = (0..joint.shape().num_wires()).collect();
            for _ in 0..trials {
                let c = sample_clifford(m, rng)?;
                let mut st = joint.clone();
                st.apply(c.matrix(), &code_wires)?;
                st.apply(attack, &all)?;
                st.apply(&c.matrix().adjoint(), &code_wires)?;
                acc.add_scaled(&st.partial_trace(&code_wires)?, 1.0 / trials as f64)?;
            }
            (acc, trials, false)
        }
    };
    let tr_pi1 = rho_b.expectation(&proj.pi1).re;
    let tr_pi0 = rho_b.expectation(&proj.pi0).re;
    let form_residual = if exact {
        let closed = two_term_form(&rho, s, m)?;
        Some(closed.matrix().max_abs_diff(rho_b.matrix()))
    } else {
        None
    };
    Ok(SecurityRecord {
        tr_pi1,
        tr_pi0,
        s,
        epsilon: params.epsilon(),
        bound: (1.0 - s).max(0.0) * params.epsilon(),
        form_residual,
        keys,
    })
}

/// `s rho + (1 - s)/(4^m - 1) sum_{P != I} P rho P^dagger` on `m` qubits.
pub fn two_term_form(rho: &DensityMatrix, s: f64, m: usize) -> Result<DensityMatrix> {
    let wires: Vec<usize> = (0..m).collect();
    let mut acc = rho.scaled(s);
    let w = (1.0 - s) / ((1usize << (2 * m)) - 1) as f64;
    for p in SymbolicPauli::all(2, m).skip(1) {
        acc.add_scaled(&p.conjugate_density(rho, &wires)?, w)?;
    }
    Ok(acc)
}

/// Non-identity Paulis on `l + e` qubits whose auxiliary part is diagonal
/// (they preserve the all-zero auxiliary space).
pub fn undetected_paulis(params: &CliffordQasParams) -> Vec<SymbolicPauli> {
    SymbolicPauli::all(2, params.m())
        .skip(1)
        .filter(|p| params.aux_wires().iter().all(|&w| p.x()[w] == 0))
        .collect()
}

/// Convenience: a one-qubit maximally mixed environment, the default in exact mode.
pub fn default_environment() -> DensityMatrix {
    DensityMatrix::maximally_mixed(RegisterShape::new(vec![2]).expect("one qubit"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcalg::clifford::enumerate_clifford;
    use crate::qcore::rng::seeded;

    fn one_plus_one() -> CliffordQasParams {
        CliffordQasParams::new(1, 1).unwrap()
    }

    #[test]
    fn identity_key_encodes_zero_to_zero() {
        let psi = StateVector::zero(RegisterShape::qubits(1).unwrap());
        let key = CliffordKey::new(CliffordElement::identity(2));
        let enc = cqas_encode(&psi, &key, &one_plus_one()).unwrap();
        assert_eq!(enc, StateVector::zero(RegisterShape::qubits(2).unwrap()));
    }

    #[test]
    fn auxiliary_flip_aborts() {
        let params = one_plus_one();
        let psi = StateVector::zero(RegisterShape::qubits(1).unwrap());
        let key = CliffordKey::new(CliffordElement::identity(2));
        let mut enc = cqas_encode(&psi, &key, &params).unwrap();
        SymbolicPauli::single(2, 2, 1, 1, 0).apply_to(&mut enc, &[0, 1]).unwrap();
        let out = cqas_decode(&enc, &key, &params, &mut seeded(0)).unwrap();
        assert_eq!(out.verdict, Verdict::Abort);
        assert!(out.message.is_none());
    }

    #[test]
    fn projectors_are_complementary() {
        let mut rng = seeded(3);
        let psi = crate::qcore::rng::random_state(RegisterShape::qubits(1).unwrap(), &mut rng);
        let p = QasProjectors::new(&psi, &RegisterShape::qubits(1).unwrap()).unwrap();
        assert!(p.pi0.mul(&p.pi1).max_abs_diff(&Matrix::zeros(4, 4)) < 1e-12);
        assert!(p.pi0.add(&p.pi1).max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn seven_undetected_paulis_for_one_plus_one() {
        assert_eq!(undetected_paulis(&one_plus_one()).len(), 7);
        let p = CliffordQasParams::new(1, 2).unwrap();
        assert_eq!(undetected_paulis(&p).len(), 4 * 4 - 1);
    }

    #[test]
    fn identity_attack_is_harmless() {
        let params = one_plus_one();
        let g = enumerate_clifford(2).unwrap();
        let psi = StateVector::zero(RegisterShape::qubits(1).unwrap());
        let env = default_environment();
        let id = crate::qcore::UnitaryMatrix::identity(RegisterShape::qubits(3).unwrap());
        let rec = cqas_security_experiment::<crate::qcore::ExperimentRng>(&params, &psi, &id, &env, KeyAverage::Exact(&g)).unwrap();
        assert!((rec.tr_pi1 - 1.0).abs() < 1e-10);
        assert!((rec.s - 1.0).abs() < 1e-10);
        assert!(rec.form_residual.unwrap() < 1e-10);
    }
}
