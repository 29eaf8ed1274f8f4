//! Finite fields, registers, states and dense linear algebra.

pub mod field;
pub mod linalg;
pub mod register;
pub mod rng;
pub mod state;

pub use field::{field_inv, FieldElement};
pub use linalg::{Matrix, C64};
pub use register::{RegisterShape, DEFAULT_DIM_CAP};
pub use rng::{seeded, ExperimentRng};
pub use state::{
    apply_on_wires, measure_wires, partial_trace, tensor, trace_distance, DensityMatrix, StateVector,
    UnitaryMatrix,
};
