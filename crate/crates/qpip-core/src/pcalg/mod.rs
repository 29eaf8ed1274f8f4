//! Pauli and Clifford algebra: symbolic Paulis, gate rules, the qubit Clifford
//! group and twirled channels.

pub mod channel;
pub mod clifford;
pub mod gates;
pub mod pauli;

pub use channel::{clifford_twirl_formula, group_average_channel, pauli_twirl_formula, AveragingGroup};
pub use clifford::{enumerate_clifford, sample_clifford, CliffordElement, CliffordGen, CliffordGroup, Tableau};
pub use gates::{conjugate_symbolic, gate_matrix, Gate, GateTag};
pub use pauli::{pauli_components, pauli_matrix, SymbolicPauli};
