//! The prover side of the protocols. A prover sees only the registers it holds
//! and the transcript; verifier keys never reach it.

use alloc::vec::Vec;

use rand::RngCore;

use super::transcript::Transcript;
use crate::error::Result;
use crate::pcalg::pauli::SymbolicPauli;
use crate::qcore::UnitaryMatrix;

/// What the prover does on top of the honest protocol at one hook.
#[derive(Clone, Debug, PartialEq)]
pub enum ProverAction {
    /// A unitary on the listed wires (block wires and/or environment).
    Unitary { wires: Vec<usize>, unitary: UnitaryMatrix },
    /// A Pauli on the listed wires.
    Pauli { wires: Vec<usize>, pauli: SymbolicPauli },
    /// Sends one block fewer than requested.
    WithholdBlock,
}

/// Where in the round the hook fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HookPoint {
    /// Just before blocks go back to the verifier (Clifford protocol).
    BeforeReturn,
    /// Just before the requested blocks are measured (polynomial protocol).
    BeforeMeasurement,
}

/// Everything a prover may look at when deciding how to deviate.
#[derive(Clone, Debug)]
pub struct AttackContext<'a> {
    pub round: usize,
    pub point: HookPoint,
    pub is_final: bool,
    /// Wires of each block about to be returned or measured.
    pub returning: Vec<Vec<usize>>,
    /// Wires of every block the prover currently holds.
    pub held: Vec<Vec<usize>>,
    pub env: Vec<usize>,
    pub wire_dim: usize,
    pub transcript: &'a Transcript,
}

/// The prover's answer in the symmetric protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    Yes,
    No,
}

pub trait Prover {
    /// Dimensions of the private environment, initialized to `|0>`.
    fn env_dims(&self) -> Vec<usize> {
        Vec::new()
    }

    fn claim(&self) -> Claim {
        Claim::Yes
    }

    /// Deviations at a hook; the honest work itself is done by the engine.
    fn act(&mut self, ctx: &AttackContext<'_>, rng: &mut dyn RngCore) -> Result<Vec<ProverAction>>;
}

/// Follows the protocol exactly.
#[derive(Clone, Copy, Debug, Default)]
pub struct HonestProver {
    pub claim: Option<Claim>,
}

impl Prover for HonestProver {
    fn claim(&self) -> Claim {
        self.claim.unwrap_or(Claim::Yes)
    }

    fn act(&mut self, _ctx: &AttackContext<'_>, _rng: &mut dyn RngCore) -> Result<Vec<ProverAction>> {
        Ok(Vec::new())
    }
}
