//! Exact statevector simulation and a variational harness for finding the
//! single marked element of an unstructured data set.
//!
//! The register holds `n` data qubits plus one label qubit (the most
//! significant). A fixed pipeline prepares an equal superposition, an
//! oracle tags the marked element by flipping the label on its basis
//! state, and a final single layer — either H/X gates chosen from the
//! marked index's bits, or one Ry rotation per qubit — concentrates
//! probability `(1 - 1/2^n)^2` on the tagged state. The same Ry layer,
//! with its angles left free, doubles as the trainable circuit of the
//! variational search: an optimizer that never sees the marked index
//! recovers the amplification from the objective alone.
//!
//! Module map:
//!
//! * [`state`] — dense statevector and gate application;
//! * [`gate`] — the gate set and its 2x2 matrices;
//! * [`circuit`] — pipeline construction and the text format;
//! * [`analysis`] — explicit tensor-product matrices and the unit-row
//!   structure checks;
//! * [`vqs`] — objective, exact shift-rule gradient, and the training
//!   loop with its termination protocol;
//! * [`reachability`] — how close the depth-1 ansatz gets to the
//!   Hilbert-space optimum;
//! * [`experiment`] — seeded batches, record files, box summaries;
//! * [`verify`] — the deterministic self-check suite.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! default type parameter on each public type is `f64`, and `*32` aliases
//! are exported for single precision. All documented tolerances assume
//! double precision.

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod reachability;
pub mod scalar;
pub mod state;
pub mod verify;
pub mod vqs;

pub use circuit::{Circuit, Layer, PipelineStates, ProblemInstance};
pub use error::{Error, Result};
pub use gate::{ControlPattern, Gate};
pub use scalar::Scalar;
pub use state::{StateVector, MAX_QUBITS};
pub use vqs::{OptimizerConfig, OptimizerKind, RunRecord, TerminationReason};

/// Single-precision aliases; the unsuffixed names default to `f64`.
pub type StateVector32 = state::StateVector<f32>;
pub type Circuit32 = circuit::Circuit<f32>;
pub type Gate32 = gate::Gate<f32>;
pub type OptimizerConfig32 = vqs::OptimizerConfig<f32>;
pub type RunRecord32 = vqs::RunRecord<f32>;
