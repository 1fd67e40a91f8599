//! Dense statevector representation and gate application.
//!
//! A register holds one label qubit plus `n` data qubits. Basis index `i`
//! is read as the bit string `i_n i_{n-1} ... i_0` with qubit `r` at bit
//! `r`; the label qubit is the most significant one. Amplitudes are kept
//! as complex pairs even though every gate in the set is real, so the
//! reality of the evolved state is an observable property rather than a
//! structural given.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gate::{ControlPattern, Gate};
use crate::scalar::Scalar;

/// Hard cap on total qubits for the desk-scale build (2^24 amplitudes).
/// A configuration constant, not an architectural limit.
pub const MAX_QUBITS: usize = 24;

/// Statevector over `num_qubits` qubits with `2^num_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar = f64> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// The all-|0> register: amplitude 1 at index 0, 0 elsewhere.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: num_qubits,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of amplitudes, `2^num_qubits`.
    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Amplitude at a basis index.
    ///
    /// Panics if `index` is out of range, like slice indexing.
    pub fn amp(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    /// |amplitude|^2 at a basis index.
    pub fn probability(&self, index: usize) -> T {
        self.amps[index].norm_sqr()
    }

    /// All basis-state probabilities; sums to 1 for a normalized state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Sum of |amplitude|^2 over the register.
    pub fn norm_sqr(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Largest |imaginary part| over all amplitudes. Stays 0 (to within
    /// rounding) under this crate's gate set.
    pub fn max_imag_abs(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc.max(a.im.abs()))
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        match gate {
            Gate::PatternControlledX { pattern, target } => {
                self.apply_pattern_controlled_x(pattern, *target)
            }
            single => {
                let m = single.matrix().expect("single-qubit gate has a matrix");
                self.apply_single_qubit(single.target(), m)
            }
        }
    }

    /// Apply a real 2x2 matrix to one qubit: the tensor-product action
    /// I ⊗ ... ⊗ U ⊗ ... ⊗ I realized as a stride over paired indices.
    fn apply_single_qubit(&mut self, qubit: usize, m: [[T; 2]; 2]) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let step = 1usize << qubit;
        for base in (0..self.amps.len()).step_by(2 * step) {
            for offset in 0..step {
                let lo = base + offset;
                let hi = lo | step;
                let a = self.amps[lo];
                let b = self.amps[hi];
                self.amps[lo] = a * m[0][0] + b * m[0][1];
                self.amps[hi] = a * m[1][0] + b * m[1][1];
            }
        }
        Ok(())
    }

    /// Flip `target` on every basis state whose data bits equal `pattern`.
    ///
    /// The pattern must cover all qubits below the label and the target
    /// must be the label qubit, so exactly one pair of amplitudes swaps.
    /// Applying the gate twice restores the state bit-for-bit.
    pub fn apply_pattern_controlled_x(
        &mut self,
        pattern: &ControlPattern,
        target: usize,
    ) -> Result<()> {
        if pattern.len() + 1 != self.num_qubits {
            return Err(Error::Shape(format!(
                "control pattern has {} bits, expected {} for a {}-qubit register",
                pattern.len(),
                self.num_qubits - 1,
                self.num_qubits
            )));
        }
        if target != self.num_qubits - 1 {
            return Err(Error::Shape(format!(
                "pattern-controlled X target must be the label qubit {}, got {target}",
                self.num_qubits - 1
            )));
        }
        let low = pattern.value();
        let high = low | (1 << target);
        self.amps.swap(low, high);
        Ok(())
    }
}
