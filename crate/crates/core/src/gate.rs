//! Gate descriptors and their real 2x2 matrices.
//!
//! The gate set is deliberately small: H, X, Ry(theta), and a
//! pattern-controlled X that flips a target qubit exactly on the basis
//! states whose data bits match a given bit string. Every matrix in the
//! set is real orthogonal, which is what keeps the amplitudes real.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Control pattern of a pattern-controlled X gate.
///
/// Bit `r` of `value` is the state required of qubit `r` for the flip to
/// fire. Rendered and parsed most-significant bit first, so the pattern
/// string is the binary form of the matching data index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ControlPattern {
    value: usize,
    len: usize,
}

impl ControlPattern {
    pub fn new(value: usize, len: usize) -> Result<Self> {
        if len == 0 || len >= usize::BITS as usize {
            return Err(Error::Argument(format!(
                "pattern length {len} must be in 1..{}",
                usize::BITS
            )));
        }
        if value >> len != 0 {
            return Err(Error::Argument(format!(
                "pattern value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self { value, len })
    }

    /// The data index that triggers the flip.
    pub fn value(&self) -> usize {
        self.value
    }

    /// Number of pattern bits (= number of controlled qubits).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// State required of qubit `r`.
    pub fn bit(&self, r: usize) -> bool {
        (self.value >> r) & 1 == 1
    }
}

impl fmt::Display for ControlPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in (0..self.len).rev() {
            f.write_str(if self.bit(r) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ControlPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Argument("empty control pattern".into()));
        }
        let mut value = 0usize;
        for c in s.chars() {
            value = match c {
                '0' => value << 1,
                '1' => (value << 1) | 1,
                _ => {
                    return Err(Error::Argument(format!(
                        "control pattern must be binary, got {s:?}"
                    )))
                }
            };
        }
        ControlPattern::new(value, s.len())
    }
}

/// A single gate acting on a register.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Scalar = f64> {
    /// Hadamard on `qubit`.
    H { qubit: usize },
    /// NOT on `qubit`.
    X { qubit: usize },
    /// Rotation about Y by `theta` radians on `qubit`.
    Ry { qubit: usize, theta: T },
    /// X on `target`, applied only where the data bits equal `pattern`.
    PatternControlledX { pattern: ControlPattern, target: usize },
}

impl<T: Scalar> Gate<T> {
    /// The real 2x2 matrix of a single-qubit kind; `None` for the
    /// pattern-controlled X.
    pub fn matrix(&self) -> Option<[[T; 2]; 2]> {
        match self {
            Gate::H { .. } => Some(h_matrix()),
            Gate::X { .. } => Some(x_matrix()),
            Gate::Ry { theta, .. } => Some(ry_matrix(*theta)),
            Gate::PatternControlledX { .. } => None,
        }
    }

    /// The qubit whose state the gate can change.
    pub fn target(&self) -> usize {
        match self {
            Gate::H { qubit } | Gate::X { qubit } | Gate::Ry { qubit, .. } => *qubit,
            Gate::PatternControlledX { target, .. } => *target,
        }
    }

    /// Largest qubit index the gate touches (controls included).
    pub fn max_qubit(&self) -> usize {
        match self {
            Gate::PatternControlledX { pattern, target } => (*target).max(pattern.len() - 1),
            _ => self.target(),
        }
    }

    /// The inverse gate. Every kind in the set is its own inverse except
    /// Ry, which inverts by negating the angle.
    pub fn inverse(&self) -> Gate<T> {
        match self {
            Gate::Ry { qubit, theta } => Gate::Ry {
                qubit: *qubit,
                theta: -*theta,
            },
            other => other.clone(),
        }
    }
}

/// H = (1/sqrt(2)) [[1, 1], [1, -1]].
pub fn h_matrix<T: Scalar>() -> [[T; 2]; 2] {
    let s = T::FRAC_1_SQRT_2();
    [[s, s], [s, -s]]
}

/// X = [[0, 1], [1, 0]].
pub fn x_matrix<T: Scalar>() -> [[T; 2]; 2] {
    [[T::zero(), T::one()], [T::one(), T::zero()]]
}

/// Ry(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
pub fn ry_matrix<T: Scalar>(theta: T) -> [[T; 2]; 2] {
    let half = theta / (T::one() + T::one());
    let (sin, cos) = half.sin_cos();
    [[cos, -sin], [sin, cos]]
}

/// X·H = (1/sqrt(2)) [[1, -1], [1, 1]], the net action of "H then X" on
/// one qubit. Equals Ry(pi/2) exactly.
pub fn xh_matrix<T: Scalar>() -> [[T; 2]; 2] {
    let s = T::FRAC_1_SQRT_2();
    [[s, -s], [s, s]]
}
