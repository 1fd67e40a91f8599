//! Circuit construction for the search pipeline.
//!
//! The pipeline has three stages (with the register state after each one
//! named psi0, psi1, psi2):
//!
//! 1. superposition — H on every data qubit, spreading weight 1/sqrt(N)
//!    over the first half of the register;
//! 2. oracle — one pattern-controlled X that moves the marked element's
//!    amplitude from data index `k` to label index `N + k`;
//! 3. layer — either the H/X construction, the fixed Ry construction, or
//!    a trainable Ry layer with one angle per qubit (label included).
//!
//! Both constructed layers leave amplitude `±(1 - 1/N)` on the marked
//! index, independent of `k`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gate::{ControlPattern, Gate};
use crate::scalar::{cast, Scalar};
use crate::state::StateVector;

/// A search instance: `n` data qubits and the marked index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    n: usize,
    k: usize,
}

impl ProblemInstance {
    /// Requires `n >= 1` and `0 <= k < 2^n`. Register capacity is checked
    /// later, when a statevector is actually allocated.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize - 1 {
            return Err(Error::Argument(format!(
                "data qubit count {n} must be in 1..{}",
                usize::BITS - 1
            )));
        }
        if k >= 1 << n {
            return Err(Error::Domain(format!(
                "marked index {k} out of range for {n} data qubits (max {})",
                (1usize << n) - 1
            )));
        }
        Ok(Self { n, k })
    }

    /// Data qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Marked element index.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Data-set size N = 2^n.
    pub fn num_elements(&self) -> usize {
        1 << self.n
    }

    /// Qubits in the register, data plus label.
    pub fn total_qubits(&self) -> usize {
        self.n + 1
    }

    /// Index of the label qubit (the most significant one).
    pub fn label_qubit(&self) -> usize {
        self.n
    }

    /// Basis index `N + k` carrying the marked element after the oracle.
    pub fn good_index(&self) -> usize {
        self.num_elements() + self.k
    }

    /// Bit `r` of `k`.
    pub fn bit(&self, r: usize) -> bool {
        (self.k >> r) & 1 == 1
    }

    /// Number of zero bits in the n-bit form of `k`. Controls the sign of
    /// the constructed Ry layer's output amplitude.
    pub fn zero_bit_count(&self) -> usize {
        self.n - self.k.count_ones() as usize
    }

    /// The oracle's control pattern, the binary form of `k`.
    pub fn pattern(&self) -> ControlPattern {
        ControlPattern::new(self.k, self.n).expect("k validated against n")
    }
}

/// An ordered gate list over a fixed-width register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T: Scalar = f64> {
    num_qubits: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    /// Append a gate, checking its qubit indices against the register.
    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        if gate.max_qubit() >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: gate.max_qubit(),
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Apply every gate in order to `state`.
    pub fn apply_to(&self, state: &mut StateVector<T>) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Shape(format!(
                "circuit is over {} qubits, state has {}",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for gate in &self.gates {
            state.apply(gate)?;
        }
        Ok(())
    }

    /// Line-oriented text form: one gate per line, angles with 17
    /// significant digits. See [`Circuit::from_text`] for the inverse.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parse the line-oriented text form produced by [`Circuit::to_text`].
    /// The register width is supplied by the caller since an empty or
    /// partial circuit does not determine it.
    pub fn from_text(text: &str, num_qubits: usize) -> Result<Self> {
        let mut circuit = Circuit::new(num_qubits);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let gate = match (fields[0], fields.len()) {
                ("H", 2) => Gate::H {
                    qubit: parse_field(fields[1], line)?,
                },
                ("X", 2) => Gate::X {
                    qubit: parse_field(fields[1], line)?,
                },
                ("RY", 3) => Gate::Ry {
                    qubit: parse_field(fields[1], line)?,
                    theta: parse_angle(fields[2], line)?,
                },
                ("CPX", 3) => Gate::PatternControlledX {
                    pattern: fields[1].parse()?,
                    target: parse_field(fields[2], line)?,
                },
                _ => {
                    return Err(Error::Argument(format!("unrecognized gate line {line:?}")));
                }
            };
            circuit.push(gate)?;
        }
        Ok(circuit)
    }
}

impl<T: Scalar> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for gate in &self.gates {
            match gate {
                Gate::H { qubit } => writeln!(f, "H {qubit}")?,
                Gate::X { qubit } => writeln!(f, "X {qubit}")?,
                Gate::Ry { qubit, theta } => writeln!(f, "RY {qubit} {theta:.16e}")?,
                Gate::PatternControlledX { pattern, target } => {
                    writeln!(f, "CPX {pattern} {target}")?
                }
            }
        }
        Ok(())
    }
}

fn parse_field(s: &str, line: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Argument(format!("bad qubit index in gate line {line:?}")))
}

fn parse_angle<T: Scalar>(s: &str, line: &str) -> Result<T> {
    let value: f64 = s
        .parse()
        .map_err(|_| Error::Argument(format!("bad angle in gate line {line:?}")))?;
    Ok(cast(value))
}

/// H on each data qubit, nothing on the label: prepares the equal
/// superposition of all N elements in the first half of the register.
pub fn build_superposition<T: Scalar>(inst: &ProblemInstance) -> Circuit<T> {
    let mut circuit = Circuit::new(inst.total_qubits());
    for q in 0..inst.n() {
        circuit.push(Gate::H { qubit: q }).expect("index in range");
    }
    circuit
}

/// The oracle: one pattern-controlled X whose pattern is the binary form
/// of `k`, targeting the label qubit.
pub fn build_oracle<T: Scalar>(inst: &ProblemInstance) -> Circuit<T> {
    let mut circuit = Circuit::new(inst.total_qubits());
    circuit
        .push(Gate::PatternControlledX {
            pattern: inst.pattern(),
            target: inst.label_qubit(),
        })
        .expect("index in range");
    circuit
}

/// The two-moment H/X layer: first H on every data qubit together with X
/// on the label, then X on each data qubit whose bit of `k` is set. Per
/// qubit that is "H, then X where the bit is 1"; gates within a moment
/// are emitted in ascending qubit order.
pub fn build_hx_layer<T: Scalar>(inst: &ProblemInstance) -> Circuit<T> {
    let mut circuit = Circuit::new(inst.total_qubits());
    for q in 0..inst.n() {
        circuit.push(Gate::H { qubit: q }).expect("index in range");
    }
    circuit
        .push(Gate::X {
            qubit: inst.label_qubit(),
        })
        .expect("index in range");
    for q in 0..inst.n() {
        if inst.bit(q) {
            circuit.push(Gate::X { qubit: q }).expect("index in range");
        }
    }
    circuit
}

/// The fixed rotation angles that make the single-moment Ry layer act
/// like the H/X layer: pi/2 where the bit of `k` is 1, 3pi/2 where it is
/// 0, and pi on the label qubit (last entry).
pub fn constructed_angles<T: Scalar>(inst: &ProblemInstance) -> Vec<T> {
    let half_pi = T::FRAC_PI_2();
    let three_half_pi = half_pi + T::PI();
    let mut angles: Vec<T> = (0..inst.n())
        .map(|q| if inst.bit(q) { half_pi } else { three_half_pi })
        .collect();
    angles.push(T::PI());
    angles
}

/// Depth-1 Ry layer at the fixed constructed angles.
pub fn build_ry_layer<T: Scalar>(inst: &ProblemInstance) -> Circuit<T> {
    build_ry_ansatz(inst.n(), &constructed_angles(inst)).expect("angle count matches by construction")
}

/// Trainable depth-1 Ry layer: `theta[r]` on data qubit `r` for
/// `r < n`, `theta[n]` on the label qubit. Requires `n + 1` angles.
pub fn build_ry_ansatz<T: Scalar>(n: usize, theta: &[T]) -> Result<Circuit<T>> {
    if theta.len() != n + 1 {
        return Err(Error::Shape(format!(
            "expected {} angles for {n} data qubits, got {}",
            n + 1,
            theta.len()
        )));
    }
    let mut circuit = Circuit::new(n + 1);
    for (q, &angle) in theta.iter().enumerate() {
        circuit
            .push(Gate::Ry {
                qubit: q,
                theta: angle,
            })
            .expect("index in range");
    }
    Ok(circuit)
}

/// Which amplification layer closes the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Layer<T: Scalar = f64> {
    /// The constructed H/X layer.
    Hx,
    /// The constructed Ry layer at the fixed angles.
    RyConstructed,
    /// A trainable Ry layer with explicit angles (length n + 1).
    RyAnsatz(Vec<T>),
}

/// The register state at the three pipeline cuts plus the probability of
/// measuring the marked element at the end.
#[derive(Debug, Clone)]
pub struct PipelineStates<T: Scalar = f64> {
    /// After superposition preparation.
    pub psi0: StateVector<T>,
    /// After the oracle.
    pub psi1: StateVector<T>,
    /// After the amplification layer.
    pub psi2: StateVector<T>,
    /// `|psi2[N + k]|^2`.
    pub p_good: T,
}

/// Superposition plus oracle: the state the variational stage trains
/// against. Amplitude 1/sqrt(N) everywhere in the first half except a 0
/// at index `k`, and a lone 1/sqrt(N) at index `N + k`.
pub fn prepare_search_state<T: Scalar>(inst: &ProblemInstance) -> Result<StateVector<T>> {
    let mut state = StateVector::zero(inst.total_qubits())?;
    build_superposition(inst).apply_to(&mut state)?;
    build_oracle(inst).apply_to(&mut state)?;
    Ok(state)
}

/// Run the full pipeline, capturing the state at each cut.
pub fn run_pipeline<T: Scalar>(inst: &ProblemInstance, layer: &Layer<T>) -> Result<PipelineStates<T>> {
    let mut state = StateVector::zero(inst.total_qubits())?;
    build_superposition(inst).apply_to(&mut state)?;
    let psi0 = state.clone();
    build_oracle(inst).apply_to(&mut state)?;
    let psi1 = state.clone();
    let layer_circuit = match layer {
        Layer::Hx => build_hx_layer(inst),
        Layer::RyConstructed => build_ry_layer(inst),
        Layer::RyAnsatz(theta) => build_ry_ansatz(inst.n(), theta)?,
    };
    layer_circuit.apply_to(&mut state)?;
    let p_good = state.probability(inst.good_index());
    Ok(PipelineStates {
        psi0,
        psi1,
        psi2: state,
        p_good,
    })
}
