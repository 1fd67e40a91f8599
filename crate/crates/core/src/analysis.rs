//! Explicit Kronecker-product matrices for the constructed layers.
//!
//! This module is the independent check on the circuit builders: it
//! materializes a layer's N x N data block as a chain of 2x2 tensor
//! factors, rescales it so every entry is ±1, and verifies the defining
//! structural property — exactly one row whose entries all share one
//! sign, sitting at row `k`. The simulator never builds these matrices;
//! they exist only here, capped at brute-force scale.

use ndarray::{array, Array2};

use crate::circuit::ProblemInstance;
use crate::error::{Error, Result};
use crate::gate::{h_matrix, ry_matrix, xh_matrix};
use crate::scalar::{cast, Scalar};

/// Cap on explicit matrix construction: 2^12 x 2^12 entries.
pub const MAX_MATRIX_QUBITS: usize = 12;

/// Tolerance for treating a rescaled entry as ±1.
const UNIT_TOL: f64 = 1e-9;

/// Which constructed layer a matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Hx,
    Ry,
}

/// Sign of the uniform row's common entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    /// Positive for an even count of sign-flipping factors.
    pub fn from_parity(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A layer's data block scaled by sqrt(2^n), so entries are ±1 up to
/// rounding.
#[derive(Debug, Clone)]
pub struct LayerMatrix<T: Scalar = f64> {
    n: usize,
    entries: Array2<T>,
}

impl<T: Scalar> LayerMatrix<T> {
    /// Wrap an already-scaled matrix. Used by callers that assemble the
    /// factor chain themselves (for instance with a deliberate defect to
    /// probe the checks).
    pub fn from_parts(n: usize, entries: Array2<T>) -> Self {
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &Array2<T> {
        &self.entries
    }
}

fn as_array<T: Scalar>(m: [[T; 2]; 2]) -> Array2<T> {
    array![[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
}

/// Tensor product of a factor list, folded left to right, so the first
/// factor addresses the most significant index bit. Entry `(i, j)` of the
/// result is the product over factors of the entry selected by the
/// corresponding bits of `i` and `j`.
pub fn kron_chain<T: Scalar>(factors: &[Array2<T>]) -> Result<Array2<T>> {
    if factors.is_empty() || factors.len() > MAX_MATRIX_QUBITS {
        return Err(Error::Argument(format!(
            "factor count {} must be in 1..={MAX_MATRIX_QUBITS}",
            factors.len()
        )));
    }
    for f in factors {
        if f.dim() != (2, 2) {
            return Err(Error::Shape(format!(
                "tensor factors must be 2x2, got {:?}",
                f.dim()
            )));
        }
    }
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = expand_by_2x2(&out, f);
    }
    Ok(out)
}

/// One fold step: acc ⊗ f for a 2x2 right factor, written blockwise —
/// every entry of the accumulator turns into a scaled copy of `f`.
fn expand_by_2x2<T: Scalar>(acc: &Array2<T>, f: &Array2<T>) -> Array2<T> {
    let m = acc.nrows();
    let out_dim = 2 * m;
    let acc = acc.as_standard_layout();
    let acc_flat = acc.as_slice().expect("standard layout");
    let (f00, f01, f10, f11) = (f[[0, 0]], f[[0, 1]], f[[1, 0]], f[[1, 1]]);
    let mut out = vec![T::zero(); out_dim * out_dim];
    for i in 0..m {
        let row = &acc_flat[i * m..(i + 1) * m];
        let top = 2 * i * out_dim;
        let bottom = top + out_dim;
        for (j, &v) in row.iter().enumerate() {
            out[top + 2 * j] = v * f00;
            out[top + 2 * j + 1] = v * f01;
            out[bottom + 2 * j] = v * f10;
            out[bottom + 2 * j + 1] = v * f11;
        }
    }
    Array2::from_shape_vec((out_dim, out_dim), out).expect("dimensions agree")
}

/// Per-qubit 2x2 factors of a layer's data block, most significant qubit
/// first: bit 1 of `k` selects X·H (or Ry(pi/2)), bit 0 selects H (or
/// Ry(3pi/2)).
pub fn layer_factors<T: Scalar>(inst: &ProblemInstance, kind: LayerKind) -> Vec<Array2<T>> {
    let three_half_pi = T::FRAC_PI_2() + T::PI();
    (0..inst.n())
        .rev()
        .map(|r| {
            let m = match (kind, inst.bit(r)) {
                (LayerKind::Hx, true) => xh_matrix(),
                (LayerKind::Hx, false) => h_matrix(),
                (LayerKind::Ry, true) => ry_matrix(T::FRAC_PI_2()),
                (LayerKind::Ry, false) => ry_matrix(three_half_pi),
            };
            as_array(m)
        })
        .collect()
}

/// Build a layer's data block and rescale by sqrt(2^n) so entries sit at
/// ±1. The overall coefficient carries no structural information, and
/// factoring it out turns the row check into near-integer comparison.
pub fn layer_matrix<T: Scalar>(inst: &ProblemInstance, kind: LayerKind) -> Result<LayerMatrix<T>> {
    if inst.n() > MAX_MATRIX_QUBITS {
        return Err(Error::Capacity {
            requested: inst.n(),
            cap: MAX_MATRIX_QUBITS,
        });
    }
    let mut entries = kron_chain(&layer_factors::<T>(inst, kind))?;
    let scale = cast::<T>((inst.num_elements() as f64).sqrt());
    entries.mapv_inplace(|x| x * scale);
    Ok(LayerMatrix {
        n: inst.n(),
        entries,
    })
}

/// Find the unique row whose entries all share one sign, and that sign.
///
/// Fails with a structure error if any entry is not ±1 to within 1e-9,
/// if no row is uniform, or if more than one is — any of which signals a
/// builder bug rather than a property of a valid layer.
pub fn locate_signed_unit_row<T: Scalar>(m: &LayerMatrix<T>) -> Result<(usize, Sign)> {
    let tol = cast::<T>(UNIT_TOL);
    let one = T::one();
    let mut found: Option<(usize, Sign)> = None;
    for (row_index, row) in m.entries.rows().into_iter().enumerate() {
        let mut all_plus = true;
        let mut all_minus = true;
        for &entry in row {
            if (entry - one).abs() <= tol {
                all_minus = false;
            } else if (entry + one).abs() <= tol {
                all_plus = false;
            } else {
                return Err(Error::Structure(format!(
                    "entry {entry} in row {row_index} is not ±1 within {UNIT_TOL}"
                )));
            }
        }
        let sign = match (all_plus, all_minus) {
            (true, false) => Sign::Plus,
            (false, true) => Sign::Minus,
            _ => continue,
        };
        if let Some((previous, _)) = found {
            return Err(Error::Structure(format!(
                "uniform rows at both {previous} and {row_index}"
            )));
        }
        found = Some((row_index, sign));
    }
    found.ok_or_else(|| Error::Structure("no uniform-sign row".into()))
}

/// The amplitude the constructed layers leave on the marked index:
/// `sign * (1 - 1/2^n)`.
pub fn predicted_good_amplitude<T: Scalar>(inst: &ProblemInstance, sign: Sign) -> T {
    let big_n = cast::<T>(inst.num_elements() as f64);
    sign.value::<T>() * (T::one() - big_n.recip())
}

/// Success probabilities `(1 - 1/2^n)^2` for `n = 1..=n_max`.
pub fn good_probability_table<T: Scalar>(n_max: usize) -> Vec<T> {
    (1..=n_max)
        .map(|n| {
            let big_n = cast::<T>((1u64 << n) as f64);
            let amp = T::one() - big_n.recip();
            amp * amp
        })
        .collect()
}

/// The sign the Ry layer's uniform row must carry: negative exactly when
/// the count of Ry(3pi/2) factors (zero bits of `k`) is odd.
pub fn expected_ry_sign(inst: &ProblemInstance) -> Sign {
    Sign::from_parity(inst.zero_bit_count())
}
