//! What the prover sees. Each block is encrypted under an independent key, so
//! the prover's view factorizes over blocks; the audits compute per-block
//! views exactly (full key averages) or by sampling keys.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::experiment::ProtocolConfig;
use crate::error::{Error, Result};
use crate::pcalg::clifford::{enumerate_clifford, sample_clifford, CliffordGroup};
use crate::pcalg::pauli::SymbolicPauli;
use crate::polycode::{codeword_state, CodeParams, SignKey};
use crate::qcore::rng::{fork, seeded};
use crate::qcore::{DensityMatrix, RegisterShape, StateVector};
use crate::qpip::circuit::{build_universal_circuit, canonical_description, CircuitIR, UniversalGate};
use crate::qpip::poly::PolyEngine;
use crate::qpip::prover::HonestProver;
use crate::qpip::transcript::Direction;

pub const EXACT_TOL: f64 = 1e-8;
pub const SAMPLED_TOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KeyAverageMode {
    Exact,
    Sampled { keys: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewDistance {
    pub round: usize,
    pub block: usize,
    /// Trace distance (or total variation for classical traffic) between the
    /// views for the two inputs.
    pub between_inputs: f64,
    /// Trace distance of the first input's view to the maximally mixed state.
    pub to_mixed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindnessRecord {
    pub protocol: String,
    pub mode: KeyAverageMode,
    pub views: Vec<ViewDistance>,
    pub max_between: f64,
    pub max_to_mixed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BlindnessRecord {
    fn new(protocol: &str, mode: KeyAverageMode, views: Vec<ViewDistance>) -> Self {
        let max_between = views.iter().map(|v| v.between_inputs).fold(0.0, f64::max);
        let max_to_mixed = views.iter().filter_map(|v| v.to_mixed).fold(0.0, f64::max);
        let tolerance = match mode {
            KeyAverageMode::Exact => EXACT_TOL,
            KeyAverageMode::Sampled { .. } => SAMPLED_TOL,
        };
        Self {
            protocol: protocol.into(),
            mode,
            passed: max_between < tolerance && max_to_mixed < tolerance,
            views,
            max_between,
            max_to_mixed,
            tolerance,
        }
    }
}

fn data_with_aux(sigma: &DensityMatrix, e: usize) -> Result<DensityMatrix> {
    let aux = StateVector::zero(RegisterShape::qubits(e)?).to_density();
    sigma.tensor(&aux)
}

fn bit_density(bit: usize) -> Result<DensityMatrix> {
    Ok(StateVector::basis(RegisterShape::qubits(1)?, &[bit])?.to_density())
}

/// `(1/|C|) sum_C C (sigma (x) |0><0|) C^dagger` over the whole enumerated group.
pub fn clifford_block_view_exact(sigma: &DensityMatrix, e: usize, group: &CliffordGroup) -> Result<DensityMatrix> {
    let rho = data_with_aux(sigma, e)?;
    let wires: Vec<usize> = (0..=e).collect();
    let mut acc = rho.zeros_like();
    for c in group.elements() {
        let mut s = rho.clone();
        s.apply(c.matrix(), &wires)?;
        acc.add_scaled(&s, 1.0)?;
    }
    Ok(acc.scaled(1.0 / group.len() as f64))
}

/// Key-sampled view of one Clifford-encoded block.
pub fn clifford_block_view_sampled(sigma: &DensityMatrix, e: usize, keys: usize, rng: &mut dyn rand::RngCore) -> Result<DensityMatrix> {
    let rho = data_with_aux(sigma, e)?;
    let wires: Vec<usize> = (0..=e).collect();
    let mut acc = rho.zeros_like();
    for _ in 0..keys {
        let c = sample_clifford(e + 1, rng)?;
        let mut s = rho.clone();
        s.apply(c.matrix(), &wires)?;
        acc.add_scaled(&s, 1.0)?;
    }
    Ok(acc.scaled(1.0 / keys as f64))
}

/// One polynomial block encoding basis digit `a`, averaged over all sign keys
/// and all `q^{2m}` Pauli pads. The pad average is taken wire by wire, which
/// is the same sum since the pad group is a product.
pub fn poly_block_view_exact(a: u32, p: &CodeParams) -> Result<DensityMatrix> {
    let keys: Vec<SignKey> = SignKey::all(p.m()).collect();
    let mut acc: Option<DensityMatrix> = None;
    for k in &keys {
        let mut rho = codeword_state(a, k, p)?.to_density();
        for w in 0..p.m() {
            let mut twirled = rho.zeros_like();
            for x in 0..p.q() {
                for z in 0..p.q() {
                    let pw = SymbolicPauli::new(p.q(), vec![x], vec![z])?;
                    twirled.add_scaled(&pw.conjugate_density(&rho, &[w])?, 1.0)?;
                }
            }
            rho = twirled.scaled(1.0 / (p.q() * p.q()) as f64);
        }
        match acc.as_mut() {
            Some(s) => s.add_scaled(&rho, 1.0)?,
            None => acc = Some(rho),
        }
    }
    Ok(acc.expect("at least one sign key").scaled(1.0 / keys.len() as f64))
}

fn mixed(shape: &RegisterShape) -> DensityMatrix {
    DensityMatrix::maximally_mixed(shape.clone())
}

/// Reduced state of every wire after each prefix of the circuit: entry `i`
/// is after `i` gates.
fn wire_states(circuit: &CircuitIR, input: &[usize]) -> Result<Vec<Vec<DensityMatrix>>> {
    let mut s = StateVector::basis(circuit.shape()?, input)?;
    let snapshot = |s: &StateVector| -> Result<Vec<DensityMatrix>> {
        let rho = s.to_density();
        (0..circuit.num_wires()).map(|w| rho.partial_trace(&[w])).collect()
    };
    let mut out = vec![snapshot(&s)?];
    for op in &circuit.ops {
        s.apply(&op.matrix(&circuit.dims)?, &op.wires())?;
        out.push(snapshot(&s)?);
    }
    Ok(out)
}

/// Exact Clifford views of every block at the first transmission, for two
/// basis inputs.
pub fn clifford_blindness_exact(input_a: &[usize], input_b: &[usize], e: usize) -> Result<BlindnessRecord> {
    if input_a.len() != input_b.len() {
        return Err(Error::InvalidParameter("inputs must have the same length".into()));
    }
    let group = enumerate_clifford(e + 1)?;
    let views = [clifford_block_view_exact(&bit_density(0)?, e, &group)?, clifford_block_view_exact(&bit_density(1)?, e, &group)?];
    let mm = mixed(views[0].shape());
    let mut out = Vec::new();
    for (j, (&a, &b)) in input_a.iter().zip(input_b).enumerate() {
        out.push(ViewDistance {
            round: 0,
            block: j,
            between_inputs: views[a].trace_distance(&views[b])?,
            to_mixed: Some(views[a].trace_distance(&mm)?),
        });
    }
    Ok(BlindnessRecord::new("clifford", KeyAverageMode::Exact, out))
}

/// Exact polynomial views of the input blocks for two digit inputs.
pub fn poly_blindness_exact(input_a: &[u32], input_b: &[u32], p: &CodeParams) -> Result<BlindnessRecord> {
    if input_a.len() != input_b.len() {
        return Err(Error::InvalidParameter("inputs must have the same length".into()));
    }
    let mut cache: Vec<Option<DensityMatrix>> = vec![None; p.q() as usize];
    let mut view = |a: u32| -> Result<DensityMatrix> {
        if cache[a as usize].is_none() {
            cache[a as usize] = Some(poly_block_view_exact(a, p)?);
        }
        Ok(cache[a as usize].clone().expect("filled above"))
    };
    let mut out = Vec::new();
    for (j, (&a, &b)) in input_a.iter().zip(input_b).enumerate() {
        let va = view(a)?;
        let vb = view(b)?;
        out.push(ViewDistance {
            round: 0,
            block: j,
            between_inputs: va.trace_distance(&vb)?,
            to_mixed: Some(va.trace_distance(&mixed(va.shape()))?),
        });
    }
    Ok(BlindnessRecord::new("polynomial", KeyAverageMode::Exact, out))
}

/// Per-round, per-block sampled views along an honest Clifford run: the
/// blocks sent in round 0, then the blocks returned after each gate.
pub fn clifford_blindness_sampled(
    circuit: &CircuitIR,
    input_a: &[usize],
    input_b: &[usize],
    e: usize,
    keys: usize,
    seed: u64,
) -> Result<BlindnessRecord> {
    let sa = wire_states(circuit, input_a)?;
    let sb = wire_states(circuit, input_b)?;
    let mut master = seeded(seed);
    let mut out = Vec::new();
    let mm = mixed(&RegisterShape::qubits(e + 1)?);
    for round in 0..=circuit.ops.len() {
        let blocks: Vec<usize> = if round == 0 {
            (0..circuit.num_wires()).collect()
        } else {
            circuit.ops[round - 1].wires()
        };
        for j in blocks {
            let va = clifford_block_view_sampled(&sa[round][j], e, keys, &mut fork(&mut master))?;
            let vb = clifford_block_view_sampled(&sb[round][j], e, keys, &mut fork(&mut master))?;
            out.push(ViewDistance {
                round,
                block: j,
                between_inputs: va.trace_distance(&vb)?,
                to_mixed: Some(va.trace_distance(&mm)?),
            });
        }
    }
    Ok(BlindnessRecord::new("clifford", KeyAverageMode::Sampled { keys }, out))
}

/// Total variation between empirical distributions over `0..q`.
fn tv(a: &[usize], b: &[usize]) -> f64 {
    let na: usize = a.iter().sum();
    let nb: usize = b.iter().sum();
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs()).sum::<f64>()
}

/// Digit histograms of the verifier's classical messages, indexed by
/// (message number, position).
fn classical_histograms(
    circuit: &CircuitIR,
    input: &[u32],
    p: &CodeParams,
    runs: usize,
    rng: &mut dyn rand::RngCore,
) -> Result<Vec<Vec<Vec<usize>>>> {
    let q = p.q() as usize;
    let mut hist: Vec<Vec<Vec<usize>>> = Vec::new();
    for _ in 0..runs {
        let rec = crate::qpip::poly::run_poly_qpip(circuit, input, p, &mut HonestProver::default(), rng, PolyEngine::LogicalFrame)?;
        let msgs: Vec<&[u32]> = rec
            .transcript
            .classical()
            .filter(|(e, _)| e.direction == Direction::VerifierToProver)
            .map(|(_, d)| d)
            .collect();
        if hist.is_empty() {
            hist = msgs.iter().map(|m| vec![vec![0; q]; m.len()]).collect();
        }
        for (h, m) in hist.iter_mut().zip(&msgs) {
            for (slot, &d) in h.iter_mut().zip(m.iter()) {
                slot[d as usize] += 1;
            }
        }
    }
    Ok(hist)
}

/// Sampled polynomial blindness across rounds: the prover's quantum view of
/// each block is exactly mixed for every key, so what remains is the
/// classical traffic; compares per-digit marginals of the verifier's decoded
/// messages between two inputs over `runs` honest runs each.
pub fn poly_blindness_sampled(
    circuit: &CircuitIR,
    input_a: &[u32],
    input_b: &[u32],
    p: &CodeParams,
    runs: usize,
    seed: u64,
) -> Result<BlindnessRecord> {
    let mut master = seeded(seed);
    let ha = classical_histograms(circuit, input_a, p, runs, &mut fork(&mut master))?;
    let hb = classical_histograms(circuit, input_b, p, runs, &mut fork(&mut master))?;
    let uniform = vec![runs; p.q() as usize];
    let mut out = Vec::new();
    for (round, (ma, mb)) in ha.iter().zip(&hb).enumerate() {
        for (pos, (da, db)) in ma.iter().zip(mb).enumerate() {
            out.push(ViewDistance {
                round: round + 1,
                block: pos,
                between_inputs: tv(da, db),
                to_mixed: Some(tv(da, &uniform)),
            });
        }
    }
    Ok(BlindnessRecord::new("polynomial", KeyAverageMode::Sampled { keys: runs }, out))
}

/// Views of the universal circuit's blocks for two descriptions on the same
/// input. The circuit's gate list does not depend on the description; only
/// the control-wire input does, and every block view is exactly mixed.
pub fn universal_blindness_exact(
    desc_a: &[UniversalGate],
    desc_b: &[UniversalGate],
    input: &[usize],
    max_gates: usize,
    e: usize,
) -> Result<BlindnessRecord> {
    let n = input.len();
    let ca = build_universal_circuit(desc_a, n, max_gates, 2)?;
    let cb = build_universal_circuit(desc_b, n, max_gates, 2)?;
    if ca.ops != cb.ops {
        return Err(Error::InvalidParameter("universal circuits differ in structure".into()));
    }
    let mut ia = input.to_vec();
    ia.extend(canonical_description(desc_a, n, max_gates)?);
    let mut ib = input.to_vec();
    ib.extend(canonical_description(desc_b, n, max_gates)?);
    let mut rec = clifford_blindness_exact(&ia, &ib, e)?;
    rec.protocol = "clifford-universal".into();
    Ok(rec)
}

/// Dispatches on the protocol and averaging mode.
pub fn blindness_audit(
    config: &ProtocolConfig,
    circuit: &CircuitIR,
    input_a: &[u32],
    input_b: &[u32],
    mode: KeyAverageMode,
    seed: u64,
) -> Result<BlindnessRecord> {
    let ua: Vec<usize> = input_a.iter().map(|&d| d as usize).collect();
    let ub: Vec<usize> = input_b.iter().map(|&d| d as usize).collect();
    match (config, mode) {
        (ProtocolConfig::Clifford { e, .. }, KeyAverageMode::Exact) => clifford_blindness_exact(&ua, &ub, *e),
        (ProtocolConfig::Clifford { e, .. }, KeyAverageMode::Sampled { keys }) => {
            clifford_blindness_sampled(circuit, &ua, &ub, *e, keys, seed)
        }
        (ProtocolConfig::Poly { params, .. }, KeyAverageMode::Exact) => poly_blindness_exact(input_a, input_b, params),
        (ProtocolConfig::Poly { params, .. }, KeyAverageMode::Sampled { keys }) => {
            poly_blindness_sampled(circuit, input_a, input_b, params, keys, seed)
        }
    }
}

/// Mean distance of a sampled one-block Clifford view to the mixed state at
/// `keys` and at `keys / 2`, over `repeats` seeds. Sampling error should
/// scale like `1/sqrt(keys)`, so the ratio is near `sqrt(2)`.
pub fn halving_regression(e: usize, keys: usize, repeats: usize, seed: u64) -> Result<(f64, f64)> {
    let sigma = bit_density(1)?;
    let mm = mixed(&RegisterShape::qubits(e + 1)?);
    let mut master = seeded(seed);
    let (mut half, mut full) = (0.0, 0.0);
    for _ in 0..repeats {
        half += clifford_block_view_sampled(&sigma, e, keys / 2, &mut fork(&mut master))?.trace_distance(&mm)?;
        full += clifford_block_view_sampled(&sigma, e, keys, &mut fork(&mut master))?.trace_distance(&mm)?;
    }
    Ok((half / repeats as f64, full / repeats as f64))
}
