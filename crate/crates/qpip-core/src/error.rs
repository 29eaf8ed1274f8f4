use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not invertible in the field")]
    NotInvertible(u32),
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("register dimension {requested} exceeds cap {cap}")]
    DimensionCap { requested: u128, cap: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("wire {0} out of range")]
    WireOutOfRange(usize),
    #[error("wire {0} listed twice")]
    RepeatedWire(usize),
    #[error("projection has zero norm")]
    ZeroNorm,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("clifford group on {0} qubits is not supported here")]
    UnsupportedCliffordSize(usize),
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("sign keys differ across blocks of a two-block logical gate")]
    SignKeyMismatch,
    #[error("the identity has no correlated decomposition")]
    IdentityPauli,
    #[error("operator is already correlated with the sign key")]
    AlreadyCorrelated,
    #[error("gate cannot be compiled to the logical gate set: {0}")]
    NotCompilable(String),
    #[error("transcript violation: {0}")]
    Transcript(String),
    #[error("adversary policy not supported by this engine: {0}")]
    PolicyUnsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
