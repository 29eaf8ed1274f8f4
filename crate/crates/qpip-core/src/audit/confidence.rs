//! How close the verifier's state is to the correct one, given that it did
//! not abort. Computed exactly: Pauli attacks under uniformly random keys are
//! replaced by their key-averaged channels.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::policy::{AdversaryPolicy, RoundSel};
use crate::error::{Error, Result};
use crate::pcalg::channel::clifford_twirl_formula;
use crate::pcalg::pauli::SymbolicPauli;
use crate::polycode::{decode_measurement, CodeParams, PauliKey, SignKey};
use crate::qcore::field::add_mod;
use crate::qcore::linalg::Matrix;
use crate::qcore::{DensityMatrix, RegisterShape, StateVector};
use crate::qpip::circuit::CircuitIR;

/// Below this acceptance probability the bound is vacuous and the audit refuses.
pub const BETA_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRecord {
    pub protocol: String,
    pub policy: String,
    /// Probability that the verifier does not abort.
    pub beta: f64,
    /// Trace distance between the conditional output state and the correct one.
    pub distance: f64,
    pub epsilon: f64,
    /// `epsilon / beta` (Clifford) or `2 epsilon / beta` (measured polynomial output).
    pub bound: f64,
    pub corrected_bound: Option<f64>,
    pub slack: f64,
    pub passed: bool,
}

impl ConfidenceRecord {
    fn new(protocol: &str, policy: String, beta: f64, distance: f64, epsilon: f64, factor: f64, corrected: Option<f64>) -> Result<Self> {
        if beta < BETA_FLOOR {
            return Err(Error::InvalidParameter(format!(
                "acceptance probability {beta:.4} is below the floor {BETA_FLOOR}; the bound is vacuous"
            )));
        }
        let bound = factor * epsilon / beta;
        Ok(Self {
            protocol: protocol.into(),
            policy,
            beta,
            distance,
            epsilon,
            bound,
            corrected_bound: corrected.map(|c| factor * c / beta),
            slack: bound - distance,
            passed: distance <= bound + 1e-6,
        })
    }
}

/// Rounds at which a Pauli policy acts in a Clifford run of `gates` gates.
fn pauli_rounds(policy: &AdversaryPolicy, gates: usize) -> Result<Vec<(usize, SymbolicPauli)>> {
    match policy {
        AdversaryPolicy::Honest => Ok(Vec::new()),
        AdversaryPolicy::FixedPauli { when, x, z } => {
            let p = SymbolicPauli::new(2, x.clone(), z.clone())?;
            Ok(match when {
                RoundSel::Final => vec![(gates + 1, p)],
                RoundSel::Round(r) => vec![(*r, p)],
                RoundSel::Every => (1..=gates + 1).map(|r| (r, p.clone())).collect(),
            })
        }
        _ => Err(Error::PolicyUnsupported("confidence audits take Pauli policies".into())),
    }
}

/// Clifford protocol, exact. Each attacked transmission is replaced by the
/// Clifford-twirled channel on that block (keys are fresh and independent).
/// The aux register of block 0 is projected onto zero at the end; the
/// remaining output qubit is compared with the correct output qubit.
pub fn clifford_confidence(circuit: &CircuitIR, input: &[usize], e: usize, policy: &AdversaryPolicy) -> Result<ConfidenceRecord> {
    let n = circuit.num_wires();
    let b = e + 1;
    let attacks = pauli_rounds(policy, circuit.ops.len())?;
    if attacks.iter().any(|(_, p)| p.num_wires() != b) {
        return Err(Error::InvalidParameter(format!("attack must act on the {b} qubits of a block")));
    }
    let shape = RegisterShape::qubits(n * b)?;
    let mut digits = vec![0; n * b];
    for (j, &bit) in input.iter().enumerate() {
        digits[j * b] = bit;
    }
    let mut rho = StateVector::basis(shape.clone(), &digits)?.to_density();
    let block = |j: usize| -> Vec<usize> { (j * b..(j + 1) * b).collect() };
    let attack = |rho: &mut DensityMatrix, round: usize, first: usize| -> Result<()> {
        for (r, p) in &attacks {
            if *r == round {
                let u = p.matrix().embed(&shape, &block(first))?;
                *rho = clifford_twirl_formula(rho, &u, &block(first))?;
            }
        }
        Ok(())
    };
    for (i, op) in circuit.ops.iter().enumerate() {
        let wires = op.wires();
        // the blocks come back for the gate, are decoded, and the gate is applied
        attack(&mut rho, i + 1, wires[0])?;
        let data: Vec<usize> = wires.iter().map(|&j| j * b).collect();
        rho.apply(&op.matrix(&circuit.dims)?, &data)?;
    }
    attack(&mut rho, circuit.ops.len() + 1, 0)?;
    // project block 0's auxiliaries onto |0>
    let aux_shape = RegisterShape::qubits(e)?;
    let mut pi = Matrix::zeros(aux_shape.total_dim(), aux_shape.total_dim());
    pi.data_mut()[0] = crate::qcore::linalg::ONE;
    rho.apply_operator(&pi, &aux_shape, &(1..b).collect::<Vec<_>>())?;
    let beta = rho.trace();
    let sigma = if beta > 0.0 {
        rho.partial_trace(&[0])?.scaled(1.0 / beta)
    } else {
        rho.partial_trace(&[0])?
    };
    let correct = circuit.simulate(input)?.to_density().partial_trace(&[0])?;
    let distance = sigma.trace_distance(&correct)?;
    ConfidenceRecord::new("clifford", policy.name(), beta, distance, libm::pow(2.0, -(e as f64)), 1.0, None)
}

/// Polynomial protocol with no Toffolis and a basis-state output, exact over
/// the sign keys: a Pauli `P` before the final measurement turns the honest
/// string `k f(alpha)` into `k f(alpha) + P_x` (the pad cancels in decoding),
/// so each sign key either aborts or yields a definite value.
pub fn poly_confidence(circuit: &CircuitIR, input: &[u32], p: &CodeParams, attack: &SymbolicPauli) -> Result<ConfidenceRecord> {
    if circuit.toffoli_count() != 0 {
        return Err(Error::InvalidParameter("the measured-output audit takes Toffoli-free circuits".into()));
    }
    let idx: Vec<usize> = input.iter().map(|&d| d as usize).collect();
    let (out, prob) = circuit.reference_output(&idx)?;
    if (prob - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("the correct output must be a basis state".into()));
    }
    let correct = out[0] as u32;
    let (beta, distance) = poly_output_distribution(correct, p, attack)?;
    let eps = libm::pow(2.0, -((p.m() - 1) as f64));
    let corrected = libm::pow(2.0, -(p.d() as f64));
    ConfidenceRecord::new("polynomial", format!("pauli(x={:?}, z={:?})", attack.x(), attack.z()), beta, distance, eps, 2.0, Some(corrected))
}

/// `(beta, distance)` for value `a` under `attack`, averaged over sign keys.
pub fn poly_output_distribution(a: u32, p: &CodeParams, attack: &SymbolicPauli) -> Result<(f64, f64)> {
    if attack.num_wires() != p.m() || attack.q() != p.q() {
        return Err(Error::InvalidParameter("attack must act on one block".into()));
    }
    let keys: Vec<SignKey> = SignKey::all(p.m()).collect();
    let mut f = vec![0u32; p.d() + 1];
    f[0] = a;
    let (mut valid, mut right) = (0usize, 0usize);
    for k in &keys {
        let honest = p.signed_evaluations(&f, k);
        let raw: Vec<u32> = honest.iter().zip(attack.x()).map(|(&h, &x)| add_mod(h, x, p.q())).collect();
        let dec = decode_measurement(&raw, k, &PauliKey::zero(p.m()), p)?;
        if dec.valid {
            valid += 1;
            if dec.value == a {
                right += 1;
            }
        }
    }
    if valid == 0 {
        return Ok((0.0, 0.0));
    }
    Ok((valid as f64 / keys.len() as f64, 1.0 - right as f64 / valid as f64))
}

/// Worst ratio `distance / bound` over every non-identity Pauli with
/// `beta >= BETA_FLOOR`, for output value `a`; also returns the worst Pauli.
pub fn poly_confidence_scan(a: u32, p: &CodeParams, epsilon: f64) -> Result<(f64, Option<SymbolicPauli>)> {
    let mut worst = (0.0, None);
    for op in SymbolicPauli::all(p.q(), p.m()).skip(1) {
        let (beta, dist) = poly_output_distribution(a, p, &op)?;
        if beta < BETA_FLOOR {
            continue;
        }
        let ratio = dist / (2.0 * epsilon / beta);
        if ratio > worst.0 {
            worst = (ratio, Some(op));
        }
    }
    Ok(worst)
}
