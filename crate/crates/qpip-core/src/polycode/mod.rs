//! The signed quantum polynomial code over F_q.

pub mod correlated;
pub mod encode;
pub mod logical;
pub mod params;

pub use correlated::{decompose_correlated, is_k_correlated, logical_action};
pub use encode::{build_dk, codeword_state, dk_forward, dk_inverse, ek_matrix, encode_ek, interpolation_circuit};
pub use logical::{apply_logical, decode_measurement, transversal_steps, Block, DecodedResult, LogicalGateTag};
pub use params::{CodeParams, PauliKey, SignKey};
