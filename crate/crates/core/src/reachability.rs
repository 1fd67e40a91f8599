//! Reachability of the depth-1 Ry ansatz.
//!
//! Reachability compares the best objective value the ansatz family can
//! produce against the best value any state in the Hilbert space could
//! produce. Two formulations are supported:
//!
//! * [`ReachabilityDefinition::SignedMin`] — ratio of signed minima. Two
//!   ansatz outputs whose marked amplitudes differ only in sign score
//!   differently here, which is the formulation's known defect.
//! * [`ReachabilityDefinition::AbsoluteMax`] — ratio built from maxima of
//!   absolute values; sign-insensitive and the default everywhere.
//!
//! Under the absolute form the score lives in [0, 1]: 0 means the ansatz
//! reaches a state as good as the Hilbert-space optimum, 1 means no
//! amplification at all. The constructed Ry layer certifies a score of
//! exactly 1/2^n, so the metric decays exponentially with register size.

use crate::circuit::{constructed_angles, prepare_search_state, ProblemInstance};
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::vqs::{objective, RunRecord};

/// Which formulation of the metric to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReachabilityDefinition {
    /// Signed minima; kept for comparison.
    SignedMin,
    /// Maxima of absolute values; the recommended default.
    AbsoluteMax,
}

impl ReachabilityDefinition {
    pub fn name(&self) -> &'static str {
        match self {
            ReachabilityDefinition::SignedMin => "signed_min",
            ReachabilityDefinition::AbsoluteMax => "absolute_max",
        }
    }
}

/// A reachability evaluation, together with the extremal objective values
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityReport<T: Scalar = f64> {
    pub n: usize,
    pub definition: ReachabilityDefinition,
    /// The ansatz-side extremal term (a minimum for the signed form, a
    /// maximum of absolute values for the absolute form).
    pub ansatz_extremal_value: T,
    /// The Hilbert-space extremal term.
    pub hilbert_extremal_value: T,
    pub reachability: T,
    /// True when the ansatz term is only an empirical bound on the true
    /// extremum, making the score an upper bound on the true metric.
    pub upper_bound: bool,
}

/// The Hilbert-space extremal objective value over all normalized states:
/// `-1/sqrt(N)` for the signed form, `+1/sqrt(N)` for the absolute form
/// (attained by the basis state at the marked index).
pub fn hilbert_extremal<T: Scalar>(n: usize, definition: ReachabilityDefinition) -> Result<T> {
    if n == 0 {
        return Err(Error::Argument("need at least one data qubit".into()));
    }
    let inv_sqrt_n = cast::<T>(1.0 / ((1u64 << n) as f64).sqrt());
    Ok(match definition {
        ReachabilityDefinition::SignedMin => -inv_sqrt_n,
        ReachabilityDefinition::AbsoluteMax => inv_sqrt_n,
    })
}

/// Turn an ansatz-side extremal objective value into a reachability
/// score.
///
/// Signed form: `(value - (-1/sqrt(N))) / (1/sqrt(N))`, range [0, 2].
/// Absolute form: `1 - sqrt(N) * |value|`, range [0, 1].
pub fn reachability_from_extremal<T: Scalar>(
    ansatz_value: T,
    n: usize,
    definition: ReachabilityDefinition,
) -> Result<T> {
    if n == 0 {
        return Err(Error::Argument("need at least one data qubit".into()));
    }
    let sqrt_n = cast::<T>(((1u64 << n) as f64).sqrt());
    if ansatz_value.abs() > sqrt_n.recip() + cast(1e-12) {
        return Err(Error::Domain(format!(
            "objective value {ansatz_value} exceeds the attainable magnitude {}",
            sqrt_n.recip()
        )));
    }
    Ok(match definition {
        ReachabilityDefinition::SignedMin => T::one() + sqrt_n * ansatz_value,
        ReachabilityDefinition::AbsoluteMax => T::one() - sqrt_n * ansatz_value.abs(),
    })
}

/// Reachability certified by the constructed Ry layer: its objective has
/// magnitude `(1 - 1/N)/sqrt(N)`, giving an absolute-form score of
/// exactly `1/2^n`. Since the constructed angles are one member of the
/// ansatz family, this also upper-bounds the family's true score.
pub fn constructed_reachability<T: Scalar>(inst: &ProblemInstance) -> Result<ReachabilityReport<T>> {
    let psi1: crate::state::StateVector<T> = prepare_search_state(inst)?;
    let value = objective(&psi1, &constructed_angles(inst))?;
    let definition = ReachabilityDefinition::AbsoluteMax;
    Ok(ReachabilityReport {
        n: inst.n(),
        definition,
        ansatz_extremal_value: value.abs(),
        hilbert_extremal_value: hilbert_extremal(inst.n(), definition)?,
        reachability: reachability_from_extremal(value, inst.n(), definition)?,
        upper_bound: true,
    })
}

/// Reachability bounded from optimization records: the largest final
/// |objective| seen across runs lower-bounds the ansatz family's true
/// maximum, so the reported score upper-bounds the true metric.
pub fn empirical_reachability<T: Scalar>(
    records: &[RunRecord<T>],
    n: usize,
) -> Result<ReachabilityReport<T>> {
    if records.is_empty() {
        return Err(Error::Argument("no records supplied".into()));
    }
    let mut best = T::zero();
    for (i, record) in records.iter().enumerate() {
        if record.theta_final.len() != n + 1 {
            return Err(Error::Argument(format!(
                "record {i} has {} angles, expected {}",
                record.theta_final.len(),
                n + 1
            )));
        }
        let last = record.objective_trace.last().ok_or_else(|| {
            Error::Argument(format!("record {i} has an empty objective trace"))
        })?;
        best = best.max(last.abs());
    }
    let definition = ReachabilityDefinition::AbsoluteMax;
    Ok(ReachabilityReport {
        n,
        definition,
        ansatz_extremal_value: best,
        hilbert_extremal_value: hilbert_extremal(n, definition)?,
        reachability: reachability_from_extremal(best, n, definition)?,
        upper_bound: true,
    })
}
