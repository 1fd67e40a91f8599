//! Deterministic self-checks behind the `verify` and `verify-all1row`
//! commands.
//!
//! Each check compares a measured quantity against its closed-form
//! expectation and reports one line of measured-vs-expected detail. The
//! suite is pure and seeded, so a fresh build either passes it entirely
//! or has a real defect.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    expected_ry_sign, good_probability_table, kron_chain, layer_matrix,
    locate_signed_unit_row, predicted_good_amplitude, LayerKind, LayerMatrix, Sign,
};
use crate::circuit::{run_pipeline, Layer, ProblemInstance};
use crate::error::Result;
use crate::gate::ry_matrix;
use crate::reachability::constructed_reachability;
use crate::scalar::{cast, Scalar};
use crate::vqs::{gradient, objective};
use ndarray::{array, Array2};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured-vs-expected detail for the report line.
    pub details: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, details: String) -> Self {
        Self {
            name: name.into(),
            passed,
            details,
        }
    }
}

/// Knobs for the suite.
#[derive(Debug, Clone)]
pub struct VerifyOptions<T: Scalar = f64> {
    /// Exhaustive unit-row sweep covers every k for n up to this.
    pub all1row_n_max: usize,
    /// Constructed reachability checked for n up to this.
    pub reachability_n_max: usize,
    /// Negative-control hook: add this angle to one Ry factor of each
    /// checked layer matrix, which must break the unit-row check.
    pub perturb_ry: Option<T>,
}

impl<T: Scalar> Default for VerifyOptions<T> {
    fn default() -> Self {
        Self {
            all1row_n_max: 10,
            reachability_n_max: 12,
            perturb_ry: None,
        }
    }
}

/// `(1 - 1/2^n)^2` for n = 1..=9, correctly rounded to four decimals
/// (n=5 is 0.9384765625, which rounds to 0.9385).
pub const EXPECTED_PROBABILITIES_4DP: [f64; 9] = [
    0.25, 0.5625, 0.7656, 0.8789, 0.9385, 0.9690, 0.9844, 0.9922, 0.9961,
];

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Run every check and collect the report.
pub fn verify_suite<T: Scalar>(options: &VerifyOptions<T>) -> Result<Vec<Check>> {
    Ok(vec![
        check_probability_table::<T>(),
        check_pipeline_probabilities::<T>()?,
        check_unit_rows(options)?,
        check_constructed_reachability::<T>(options.reachability_n_max)?,
        check_objective_identity::<T>()?,
        check_gradient_agreement::<T>()?,
    ])
}

fn check_probability_table<T: Scalar>() -> Check {
    let table = good_probability_table::<T>(9);
    let mut worst = 0.0f64;
    for (value, expected) in table.iter().zip(EXPECTED_PROBABILITIES_4DP) {
        let dev = (value.to_f64().unwrap() - expected).abs();
        worst = worst.max(dev);
    }
    Check::new(
        "probability-table",
        worst < 5e-5,
        format!("n=1..9 vs 4-decimal table, max deviation {worst:.2e} (tol 5e-5)"),
    )
}

fn check_pipeline_probabilities<T: Scalar>() -> Result<Check> {
    let mut worst = 0.0f64;
    for n in 1..=9usize {
        let k = (1usize << n) / 2;
        let inst = ProblemInstance::new(n, k)?;
        let expected = EXPECTED_PROBABILITIES_4DP[n - 1];
        for layer in [Layer::Hx, Layer::RyConstructed] {
            let out = run_pipeline::<T>(&inst, &layer)?;
            let dev = (out.p_good.to_f64().unwrap() - expected).abs();
            worst = worst.max(dev);
        }
    }
    Ok(Check::new(
        "pipeline-probability",
        worst < 5e-5,
        format!("both layers, n=1..9 sample k, max deviation {worst:.2e} (tol 5e-5)"),
    ))
}

/// Layer matrix with the optional negative-control perturbation folded
/// into the least significant qubit's Ry factor.
fn checked_layer_matrix<T: Scalar>(
    inst: &ProblemInstance,
    kind: LayerKind,
    perturb: Option<T>,
) -> Result<LayerMatrix<T>> {
    match (kind, perturb) {
        (LayerKind::Ry, Some(delta)) => {
            let three_half_pi = T::FRAC_PI_2() + T::PI();
            let factors: Vec<Array2<T>> = (0..inst.n())
                .rev()
                .map(|r| {
                    let mut angle = if inst.bit(r) { T::FRAC_PI_2() } else { three_half_pi };
                    if r == 0 {
                        angle += delta;
                    }
                    let m = ry_matrix(angle);
                    array![[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
                })
                .collect();
            let mut raw = kron_chain::<T>(&factors)?;
            let scale = cast::<T>((inst.num_elements() as f64).sqrt());
            raw.mapv_inplace(|x| x * scale);
            Ok(LayerMatrix::from_parts(inst.n(), raw))
        }
        _ => layer_matrix(inst, kind),
    }
}

/// Examine one instance; returns (row, sign, predicted amplitude) or an
/// error string.
pub fn unit_row_outcome<T: Scalar>(
    inst: &ProblemInstance,
    kind: LayerKind,
    perturb: Option<T>,
) -> std::result::Result<(usize, Sign, T, bool), String> {
    let matrix = checked_layer_matrix(inst, kind, perturb).map_err(|e| e.to_string())?;
    let (row, sign) = locate_signed_unit_row(&matrix).map_err(|e| e.to_string())?;
    let expected_sign = match kind {
        LayerKind::Hx => Sign::Plus,
        LayerKind::Ry => expected_ry_sign(inst),
    };
    let ok = row == inst.k() && sign == expected_sign;
    Ok((row, sign, predicted_good_amplitude(inst, sign), ok))
}

fn check_unit_rows<T: Scalar>(options: &VerifyOptions<T>) -> Result<Check> {
    let mut instances = Vec::new();
    for n in 1..=options.all1row_n_max {
        for k in 0..(1usize << n) {
            instances.push(ProblemInstance::new(n, k)?);
        }
    }
    let failures: usize = instances
        .par_iter()
        .map(|inst| {
            let mut bad = 0usize;
            for kind in [LayerKind::Hx, LayerKind::Ry] {
                match unit_row_outcome(inst, kind, options.perturb_ry) {
                    Ok((_, _, _, true)) => {}
                    _ => bad += 1,
                }
            }
            bad
        })
        .sum();
    let total = instances.len();
    Ok(Check::new(
        "unit-row-position",
        failures == 0,
        format!(
            "{total} instances x 2 layers through n={}, {failures} failures",
            options.all1row_n_max
        ),
    ))
}

fn check_constructed_reachability<T: Scalar>(n_max: usize) -> Result<Check> {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for k in [0usize, (1 << n) - 1, (1 << n) / 2] {
            let inst = ProblemInstance::new(n, k)?;
            let report = constructed_reachability::<T>(&inst)?;
            let expected = 1.0 / (1u64 << n) as f64;
            let dev = (report.reachability.to_f64().unwrap() - expected).abs();
            worst = worst.max(dev);
        }
    }
    Ok(Check::new(
        "constructed-reachability",
        worst < 1e-12,
        format!("n=1..{n_max}, |score - 2^-n| max {worst:.2e} (tol 1e-12)"),
    ))
}

fn check_objective_identity<T: Scalar>() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_identity = 0.0f64;
    let mut bound_ok = true;
    for _ in 0..40 {
        let n = rng.gen_range(1..=6usize);
        let k = rng.gen_range(0..(1usize << n));
        let inst = ProblemInstance::new(n, k)?;
        let theta: Vec<T> = (0..=n)
            .map(|_| cast::<T>(rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let out = run_pipeline(&inst, &Layer::RyAnsatz(theta.clone()))?;
        let psi1 = out.psi1;
        let f = objective(&psi1, &theta)?.to_f64().unwrap();
        let sqrt_n = (inst.num_elements() as f64).sqrt();
        let amp = out.psi2.amp(inst.good_index()).re.to_f64().unwrap();
        worst_identity = worst_identity.max((f + amp / sqrt_n).abs());
        bound_ok &= f.abs() <= 1.0 / sqrt_n + 1e-12;
    }
    Ok(Check::new(
        "objective-identity",
        worst_identity < 1e-12 && bound_ok,
        format!(
            "40 random cases, |f + amp/sqrt(N)| max {worst_identity:.2e} (tol 1e-12), bound {}",
            if bound_ok { "held" } else { "violated" }
        ),
    ))
}

fn check_gradient_agreement<T: Scalar>() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let n = rng.gen_range(1..=5usize);
        let k = rng.gen_range(0..(1usize << n));
        let inst = ProblemInstance::new(n, k)?;
        let psi1 = crate::circuit::prepare_search_state::<T>(&inst)?;
        let theta: Vec<T> = (0..=n)
            .map(|_| cast::<T>(rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let exact = gradient(&psi1, &theta)?;
        for i in 0..theta.len() {
            let mut shifted = theta.clone();
            shifted[i] = theta[i] + cast(h);
            let plus = objective(&psi1, &shifted)?.to_f64().unwrap();
            shifted[i] = theta[i] - cast(h);
            let minus = objective(&psi1, &shifted)?.to_f64().unwrap();
            let fd = (plus - minus) / (2.0 * h);
            worst = worst.max((exact[i].to_f64().unwrap() - fd).abs());
        }
    }
    Ok(Check::new(
        "gradient-agreement",
        worst < 1e-6,
        format!("25 random cases vs central differences, max deviation {worst:.2e} (tol 1e-6)"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_suite_passes() {
        let options = VerifyOptions::<f64> {
            all1row_n_max: 6,
            reachability_n_max: 8,
            perturb_ry: None,
        };
        let checks = verify_suite(&options).unwrap();
        assert_eq!(checks.len(), 6);
        for check in &checks {
            assert!(check.passed, "{}: {}", check.name, check.details);
        }
        assert!(all_passed(&checks));
    }

    #[test]
    fn perturbed_ry_angle_breaks_the_unit_row_check() {
        let options = VerifyOptions::<f64> {
            all1row_n_max: 4,
            reachability_n_max: 4,
            perturb_ry: Some(0.02),
        };
        let checks = verify_suite(&options).unwrap();
        let unit_row = checks
            .iter()
            .find(|c| c.name == "unit-row-position")
            .unwrap();
        assert!(!unit_row.passed);
        assert!(!all_passed(&checks));
    }
}
