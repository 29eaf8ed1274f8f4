//! Adversary policies. A policy only ever sees what the prover holds and the
//! transcript, through [`AttackContext`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcalg::pauli::SymbolicPauli;
use crate::qcore::linalg::{Matrix, C64};
use crate::qcore::rng::random_unitary;
use crate::qcore::{RegisterShape, UnitaryMatrix};
use crate::qpip::prover::{AttackContext, Claim, Prover, ProverAction};

/// Rotation angle per round of the default slow-rotation attack.
pub const ZENO_ANGLE: f64 = 0.857 / 40.0;

/// Real parameters of the default two-qubit generator: four diagonal entries,
/// then the real and imaginary parts of the upper triangle in row order.
pub const ZENO_GENERATOR: [f64; 16] = [
    -3.309, -0.228, -0.265, 0.05, -0.919, -0.009, -0.185, -0.498, -1.758, -0.305, 0.114, -1.052, 0.147, 1.628, -0.123,
    -1.732,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundSel {
    Final,
    Round(usize),
    Every,
}

impl RoundSel {
    fn matches(&self, ctx: &AttackContext<'_>) -> bool {
        match self {
            RoundSel::Final => ctx.is_final,
            RoundSel::Round(r) => ctx.round == *r,
            RoundSel::Every => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryPolicy {
    Honest,
    /// A fixed Pauli on the first block being returned or measured.
    FixedPauli { when: RoundSel, x: Vec<u32>, z: Vec<u32> },
    /// A Haar-random unitary on the first returned block and a private
    /// environment of qubits, drawn once per run.
    RandomUnitary { env_qubits: usize, when: RoundSel },
    /// At the final hook, applies the Pauli when the digits of all classical
    /// traffic so far sum to an odd number (or, with no classical traffic,
    /// when the transcript has an odd number of entries).
    Scripted { x: Vec<u32>, z: Vec<u32> },
    /// `exp(-i angle G)` on the output block at every hook.
    ZenoDemo { angle: f64, generator: Vec<f64> },
    /// Withholds one block in the given round.
    WrongBlockCount { round: usize },
}

impl AdversaryPolicy {
    pub fn zeno_default() -> Self {
        AdversaryPolicy::ZenoDemo {
            angle: ZENO_ANGLE,
            generator: ZENO_GENERATOR.to_vec(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AdversaryPolicy::Honest => "honest".into(),
            AdversaryPolicy::FixedPauli { when, x, z } => format!("fixed-pauli(x={x:?}, z={z:?}, {when:?})"),
            AdversaryPolicy::RandomUnitary { env_qubits, when } => format!("random-unitary(env={env_qubits}, {when:?})"),
            AdversaryPolicy::Scripted { x, z } => format!("scripted(x={x:?}, z={z:?})"),
            AdversaryPolicy::ZenoDemo { angle, .. } => format!("zeno-demo(angle={angle})"),
            AdversaryPolicy::WrongBlockCount { round } => format!("wrong-block-count(round={round})"),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, AdversaryPolicy::Honest)
    }

    /// Whether every deviation is a Pauli (what the logical-frame engine can track).
    pub fn is_pauli(&self) -> bool {
        matches!(
            self,
            AdversaryPolicy::Honest
                | AdversaryPolicy::FixedPauli { .. }
                | AdversaryPolicy::Scripted { .. }
                | AdversaryPolicy::WrongBlockCount { .. }
        )
    }

    pub fn prover(&self, claim: Claim) -> Result<PolicyProver> {
        let zeno = match self {
            AdversaryPolicy::ZenoDemo { angle, generator } => Some(rotation(&zeno_generator(generator)?, *angle)?),
            _ => None,
        };
        Ok(PolicyProver {
            policy: self.clone(),
            claim,
            unitary: None,
            zeno,
        })
    }
}

/// Short names accepted by [`named_policy`].
pub const POLICY_NAMES: &[&str] = &[
    "honest",
    "x-flip",
    "z-flip",
    "aux-flip",
    "x-flip-every",
    "scripted",
    "random-unitary",
    "withhold",
    "zeno",
];

fn unit(block_len: usize, wire: usize) -> Vec<u32> {
    let mut v = vec![0; block_len];
    v[wire] = 1;
    v
}

/// A named policy for blocks of `block_len` wires. The flips act on the first
/// block of the final transmission; `aux-flip` hits the block's second wire.
pub fn named_policy(name: &str, block_len: usize) -> Result<AdversaryPolicy> {
    if block_len < 2 {
        return Err(Error::InvalidParameter("blocks have at least two wires".into()));
    }
    let zero = vec![0; block_len];
    Ok(match name {
        "honest" => AdversaryPolicy::Honest,
        "x-flip" => AdversaryPolicy::FixedPauli {
            when: RoundSel::Final,
            x: unit(block_len, 0),
            z: zero,
        },
        "z-flip" => AdversaryPolicy::FixedPauli {
            when: RoundSel::Final,
            x: zero,
            z: unit(block_len, 0),
        },
        "aux-flip" => AdversaryPolicy::FixedPauli {
            when: RoundSel::Final,
            x: unit(block_len, 1),
            z: zero,
        },
        "x-flip-every" => AdversaryPolicy::FixedPauli {
            when: RoundSel::Every,
            x: unit(block_len, 0),
            z: zero,
        },
        "scripted" => AdversaryPolicy::Scripted {
            x: unit(block_len, 0),
            z: zero,
        },
        "random-unitary" => AdversaryPolicy::RandomUnitary {
            env_qubits: 1,
            when: RoundSel::Final,
        },
        "withhold" => AdversaryPolicy::WrongBlockCount { round: 1 },
        "zeno" => AdversaryPolicy::zeno_default(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown adversary {other:?}; expected one of {POLICY_NAMES:?}"
            )))
        }
    })
}

/// Every named policy that applies to blocks of `block_len` wires over
/// dimension `wire_dim` (the slow-rotation attack needs two-qubit blocks).
pub fn shipped_policies(block_len: usize, wire_dim: usize) -> Result<Vec<AdversaryPolicy>> {
    POLICY_NAMES
        .iter()
        .filter(|n| **n != "zeno" || (block_len == 2 && wire_dim == 2))
        .map(|n| named_policy(n, block_len))
        .collect()
}

/// Hermitian 4x4 matrix from 16 real parameters (see [`ZENO_GENERATOR`]).
pub fn zeno_generator(p: &[f64]) -> Result<Matrix> {
    if p.len() != 16 {
        return Err(Error::InvalidParameter(format!("generator needs 16 parameters, got {}", p.len())));
    }
    let mut g = Matrix::zeros(4, 4);
    for i in 0..4 {
        g.data_mut()[i * 4 + i] = C64::new(p[i], 0.0);
    }
    let upper = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for (t, &(r, c)) in upper.iter().enumerate() {
        let v = C64::new(p[4 + t], p[10 + t]);
        g.data_mut()[r * 4 + c] = v;
        g.data_mut()[c * 4 + r] = v.conj();
    }
    Ok(g)
}

/// `exp(-i angle G)` as a two-qubit unitary.
pub fn rotation(g: &Matrix, angle: f64) -> Result<UnitaryMatrix> {
    UnitaryMatrix::new(RegisterShape::qubits(2)?, g.scale(C64::new(0.0, -angle)).expm())
}

/// A prover driven by an [`AdversaryPolicy`].
pub struct PolicyProver {
    policy: AdversaryPolicy,
    claim: Claim,
    unitary: Option<UnitaryMatrix>,
    zeno: Option<UnitaryMatrix>,
}

impl Prover for PolicyProver {
    fn env_dims(&self) -> Vec<usize> {
        match &self.policy {
            AdversaryPolicy::RandomUnitary { env_qubits, .. } => vec![2; *env_qubits],
            _ => Vec::new(),
        }
    }

    fn claim(&self) -> Claim {
        self.claim
    }

    fn act(&mut self, ctx: &AttackContext<'_>, rng: &mut dyn RngCore) -> Result<Vec<ProverAction>> {
        let first = match ctx.returning.first() {
            Some(w) => w.clone(),
            None => return Ok(Vec::new()),
        };
        let pauli = |x: &[u32], z: &[u32]| -> Result<ProverAction> {
            if x.len() != first.len() || z.len() != first.len() {
                return Err(Error::InvalidParameter(format!(
                    "Pauli of length {} for a block of {} wires",
                    x.len(),
                    first.len()
                )));
            }
            Ok(ProverAction::Pauli {
                wires: first.clone(),
                pauli: SymbolicPauli::new(ctx.wire_dim as u32, x.to_vec(), z.to_vec())?,
            })
        };
        match &self.policy {
            AdversaryPolicy::Honest => Ok(Vec::new()),
            AdversaryPolicy::FixedPauli { when, x, z } => Ok(if when.matches(ctx) { vec![pauli(x, z)?] } else { Vec::new() }),
            AdversaryPolicy::Scripted { x, z } => {
                if !ctx.is_final {
                    return Ok(Vec::new());
                }
                let digits: u64 = ctx.transcript.classical().flat_map(|(_, d)| d.iter().map(|&v| v as u64)).sum();
                let any = ctx.transcript.classical().next().is_some();
                let odd = if any { digits % 2 == 1 } else { ctx.transcript.entries().len() % 2 == 1 };
                Ok(if odd { vec![pauli(x, z)?] } else { Vec::new() })
            }
            AdversaryPolicy::RandomUnitary { when, .. } => {
                if !when.matches(ctx) {
                    return Ok(Vec::new());
                }
                let mut wires = first.clone();
                wires.extend_from_slice(&ctx.env);
                let mut dims = vec![ctx.wire_dim; first.len()];
                dims.extend(ctx.env.iter().map(|_| 2));
                if self.unitary.as_ref().map(|u| u.shape().dims() != dims.as_slice()).unwrap_or(true) {
                    self.unitary = Some(random_unitary(RegisterShape::new(dims)?, rng));
                }
                Ok(vec![ProverAction::Unitary {
                    wires,
                    unitary: self.unitary.clone().expect("sampled above"),
                }])
            }
            AdversaryPolicy::ZenoDemo { .. } => {
                let u = self.zeno.as_ref().expect("built with the policy");
                match ctx.returning.iter().find(|w| w.first() == Some(&0)) {
                    Some(w) if w.len() == 2 && ctx.wire_dim == 2 => Ok(vec![ProverAction::Unitary {
                        wires: w.clone(),
                        unitary: u.clone(),
                    }]),
                    Some(_) => Err(Error::PolicyUnsupported("the slow-rotation attack needs two-qubit blocks".into())),
                    None => Ok(Vec::new()),
                }
            }
            AdversaryPolicy::WrongBlockCount { round } => {
                Ok(if ctx.round == *round { vec![ProverAction::WithholdBlock] } else { Vec::new() })
            }
        }
    }
}
