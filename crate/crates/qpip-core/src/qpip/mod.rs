//! Interactive proof protocols: circuits, compilation to logical rounds, the
//! Toffoli gadget, key bookkeeping, transcripts and the protocol engines.

pub mod circuit;
pub mod clifford;
pub mod keys;
pub mod poly;
pub mod prover;
pub mod schedule;
pub mod sym;
pub mod transcript;

pub use circuit::{build_universal_circuit, canonical_description, CircuitIR, CircuitOp, UniversalGate};
pub use keys::pauli_key_update;
pub use schedule::{compile_to_logical, magic_state, toffoli_correction, toffoli_gadget, LogicalOp, LogicalSchedule};
pub use clifford::{run_clifford_qpip, CliffordQpipConfig};
pub use prover::{AttackContext, Claim, HonestProver, HookPoint, Prover, ProverAction};
pub use transcript::{Channel, Direction, Payload, ProtocolVerdict, Transcript, TranscriptEntry, VerdictRecord};
pub use poly::{run_poly_qpip, PolyEngine, ACCEPT_VALUE};
pub use sym::{complement_circuit, run_qpip_sym, SymOutcome};
