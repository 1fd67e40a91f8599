use thiserror::Error;

/// Errors produced by the simulator, circuit builders, and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A register or matrix would exceed the desk-scale capacity cap.
    #[error("capacity exceeded: {requested} qubits requested, cap is {cap}")]
    Capacity { requested: usize, cap: usize },

    /// A qubit index does not exist in the register.
    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    /// Dimensions of two objects do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A value lies outside the mathematically valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied argument is unusable.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A structural invariant failed, signalling a builder bug.
    #[error("structure check failed: {0}")]
    Structure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("record serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
