//! The variational search loop.
//!
//! The trainable circuit is a single Ry layer applied to the post-oracle
//! state psi1. The objective is the matrix element of a diagonal
//! observable between psi1 and the layer's output psi2; because psi1 has
//! a single nonzero entry of 1/sqrt(N) in its second half, the objective
//! equals `-psi2[N + k] / sqrt(N)` — yet it is computed as a plain inner
//! product, without ever reading `k`. Everything inside the update loop
//! is blind to the marked index; only oracle construction (before) and
//! the final probability evaluation (after) touch it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build_ry_ansatz, prepare_search_state, ProblemInstance};
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::state::StateVector;

/// The diagonal observable `diag(0 x N, -1 x N)`: zero on the unlabeled
/// half of the register, minus one on the labeled half. Equals
/// `0.5 * (-I + Z_label)` where Z acts on the label qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observable {
    n: usize,
}

impl Observable {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `<bra| O |ket>` as a real number. With real states this is minus
    /// the inner product of the two second halves.
    pub fn expectation<T: Scalar>(
        &self,
        bra: &StateVector<T>,
        ket: &StateVector<T>,
    ) -> Result<T> {
        let dim = 1usize << (self.n + 1);
        if bra.dimension() != dim || ket.dimension() != dim {
            return Err(Error::Shape(format!(
                "observable over {} qubits, states have {} and {} amplitudes",
                self.n + 1,
                bra.dimension(),
                ket.dimension()
            )));
        }
        let half = dim / 2;
        let mut acc = T::zero();
        for (a, b) in bra.amps()[half..].iter().zip(&ket.amps()[half..]) {
            // Real part of conj(a) * b.
            acc += a.re * b.re + a.im * b.im;
        }
        Ok(-acc)
    }
}

/// Objective value at `theta`: apply the Ry layer to psi1 and take the
/// observable matrix element against psi1. Ranges over a subset of
/// `[-1/sqrt(N), 1/sqrt(N)]`.
pub fn objective<T: Scalar>(psi1: &StateVector<T>, theta: &[T]) -> Result<T> {
    let n = psi1.num_qubits() - 1;
    let circuit = build_ry_ansatz(n, theta)?;
    let mut psi2 = psi1.clone();
    circuit.apply_to(&mut psi2)?;
    Observable::new(n).expectation(psi1, &psi2)
}

/// Exact gradient of the objective.
///
/// The objective is linear in each qubit's 2x2 rotation factor, so as a
/// function of one angle alone it is `A*cos(theta_i/2 + phi)`. Shifting
/// that angle by ±pi therefore yields the derivative exactly:
/// `df/dtheta_i = (f(theta + pi*e_i) - f(theta - pi*e_i)) / 4`.
pub fn gradient<T: Scalar>(psi1: &StateVector<T>, theta: &[T]) -> Result<Vec<T>> {
    let quarter = cast::<T>(0.25);
    let mut shifted = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        shifted[i] = theta[i] + T::PI();
        let plus = objective(psi1, &shifted)?;
        shifted[i] = theta[i] - T::PI();
        let minus = objective(psi1, &shifted)?;
        shifted[i] = theta[i];
        grad.push((plus - minus) * quarter);
    }
    Ok(grad)
}

/// Parameter-update rule for the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OptimizerKind {
    GradientDescent,
    Adam,
}

/// Knobs of the iterative loop. Defaults: 300 iterations, small-change
/// threshold 1e-4 sustained for 5 consecutive iterations, Adam at
/// learning rate 0.1.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig<T: Scalar = f64> {
    pub max_iterations: usize,
    /// Relative-change level below which an iteration counts as a
    /// small-change event.
    pub small_change_threshold: T,
    /// Consecutive small-change events that terminate the run.
    pub consecutive_events_required: usize,
    pub learning_rate: T,
    pub optimizer_kind: OptimizerKind,
    pub seed: u64,
    /// Hold the label-qubit angle fixed at pi instead of training it.
    pub fix_label_angle: bool,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            small_change_threshold: cast(1e-4),
            consecutive_events_required: 5,
            learning_rate: cast(0.1),
            optimizer_kind: OptimizerKind::Adam,
            seed: 42,
            fix_label_angle: false,
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.consecutive_events_required == 0 {
            return Err(Error::Argument(
                "iteration counts must be positive".into(),
            ));
        }
        if self.small_change_threshold <= T::zero() || self.learning_rate <= T::zero() {
            return Err(Error::Argument(
                "threshold and learning rate must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminationReason {
    MaxIterations,
    SmallChange,
}

/// Everything recorded about one optimization run. Serialized as one
/// JSON object per line in record files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RunRecord<T: Scalar = f64> {
    pub seed: u64,
    pub theta_initial: Vec<T>,
    pub theta_final: Vec<T>,
    /// Objective value after each iteration's update; one entry per
    /// iteration used.
    pub objective_trace: Vec<T>,
    pub iterations_used: usize,
    pub termination_reason: TerminationReason,
    /// `|psi2[N + k]|^2` at the final angles, evaluated after training.
    pub amplified_probability: T,
}

/// Initial angles drawn uniformly from [0, 2pi), one per qubit, label
/// last. With `fix_label_angle` the label entry is pinned to pi after
/// sampling so the data-angle draws stay aligned across both modes.
pub fn initial_angles<T: Scalar>(n: usize, config: &OptimizerConfig<T>) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut theta: Vec<T> = (0..=n)
        .map(|_| rng.gen_range(T::zero()..T::TAU()))
        .collect();
    if config.fix_label_angle {
        theta[n] = T::PI();
    }
    theta
}

/// Seed for run `index` of a batch: `base + index`, so batches are
/// order-stable and safe to execute in parallel.
pub fn derive_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// An iteration counts as a small-change event when the relative change
/// of the objective across consecutive evaluations falls below the
/// threshold. A previous value of exactly zero counts only if the
/// current value is also exactly zero.
fn is_small_change<T: Scalar>(previous: T, current: T, threshold: T) -> bool {
    if previous == T::zero() {
        current == T::zero()
    } else {
        ((current - previous) / previous).abs() < threshold
    }
}

enum Updater<T> {
    GradientDescent,
    Adam {
        first_moment: Vec<T>,
        second_moment: Vec<T>,
        step: u32,
    },
}

impl<T: Scalar> Updater<T> {
    fn new(kind: OptimizerKind, len: usize) -> Self {
        match kind {
            OptimizerKind::GradientDescent => Updater::GradientDescent,
            OptimizerKind::Adam => Updater::Adam {
                first_moment: vec![T::zero(); len],
                second_moment: vec![T::zero(); len],
                step: 0,
            },
        }
    }

    fn apply(&mut self, theta: &mut [T], grad: &[T], learning_rate: T) {
        match self {
            Updater::GradientDescent => {
                for (t, g) in theta.iter_mut().zip(grad) {
                    *t -= learning_rate * *g;
                }
            }
            Updater::Adam {
                first_moment,
                second_moment,
                step,
            } => {
                let beta1 = cast::<T>(0.9);
                let beta2 = cast::<T>(0.999);
                let epsilon = cast::<T>(1e-8);
                *step += 1;
                let correction1 = T::one() - beta1.powi(*step as i32);
                let correction2 = T::one() - beta2.powi(*step as i32);
                for i in 0..theta.len() {
                    first_moment[i] = beta1 * first_moment[i] + (T::one() - beta1) * grad[i];
                    second_moment[i] =
                        beta2 * second_moment[i] + (T::one() - beta2) * grad[i] * grad[i];
                    let m_hat = first_moment[i] / correction1;
                    let v_hat = second_moment[i] / correction2;
                    theta[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                }
            }
        }
    }
}

struct TrainOutcome<T: Scalar> {
    theta: Vec<T>,
    trace: Vec<T>,
    iterations: usize,
    reason: TerminationReason,
}

/// The update loop. Deliberately takes only the post-oracle state and the
/// starting angles — no instance, no marked index.
fn train<T: Scalar>(
    psi1: &StateVector<T>,
    mut theta: Vec<T>,
    config: &OptimizerConfig<T>,
) -> Result<TrainOutcome<T>> {
    let label = theta.len() - 1;
    let mut updater = Updater::new(config.optimizer_kind, theta.len());
    let mut trace = Vec::new();
    let mut previous = objective(psi1, &theta)?;
    let mut consecutive = 0usize;
    let mut reason = TerminationReason::MaxIterations;
    for _ in 0..config.max_iterations {
        let mut grad = gradient(psi1, &theta)?;
        if config.fix_label_angle {
            grad[label] = T::zero();
        }
        updater.apply(&mut theta, &grad, config.learning_rate);
        let current = objective(psi1, &theta)?;
        trace.push(current);
        if is_small_change(previous, current, config.small_change_threshold) {
            consecutive += 1;
        } else {
            consecutive = 0;
        }
        previous = current;
        if consecutive >= config.consecutive_events_required {
            reason = TerminationReason::SmallChange;
            break;
        }
    }
    let iterations = trace.len();
    Ok(TrainOutcome {
        theta,
        trace,
        iterations,
        reason,
    })
}

/// One full run: sample initial angles from the config seed, train, then
/// score the final state on the marked index.
pub fn optimize<T: Scalar>(
    inst: &ProblemInstance,
    config: &OptimizerConfig<T>,
) -> Result<RunRecord<T>> {
    let theta0 = initial_angles(inst.n(), config);
    optimize_with_initial(inst, theta0, config)
}

/// [`optimize`] with explicit starting angles.
pub fn optimize_with_initial<T: Scalar>(
    inst: &ProblemInstance,
    theta_initial: Vec<T>,
    config: &OptimizerConfig<T>,
) -> Result<RunRecord<T>> {
    config.validate()?;
    if theta_initial.len() != inst.total_qubits() {
        return Err(Error::Shape(format!(
            "expected {} initial angles, got {}",
            inst.total_qubits(),
            theta_initial.len()
        )));
    }
    let psi1 = prepare_search_state(inst)?;
    let outcome = train(&psi1, theta_initial.clone(), config)?;

    // Post-hoc scoring is the one place the run reads the marked index.
    let mut psi2 = psi1.clone();
    build_ry_ansatz(inst.n(), &outcome.theta)?.apply_to(&mut psi2)?;
    let amplified_probability = psi2.probability(inst.good_index());

    Ok(RunRecord {
        seed: config.seed,
        theta_initial,
        theta_final: outcome.theta,
        objective_trace: outcome.trace,
        iterations_used: outcome.iterations,
        termination_reason: outcome.reason,
        amplified_probability,
    })
}

/// `num_runs` independent runs with seeds `base, base+1, ...`. Runs
/// execute in parallel; results are ordered by run index regardless of
/// scheduling.
pub fn run_batch<T: Scalar>(
    inst: &ProblemInstance,
    config: &OptimizerConfig<T>,
    num_runs: usize,
) -> Result<Vec<RunRecord<T>>> {
    if num_runs == 0 {
        return Err(Error::Argument("num_runs must be at least 1".into()));
    }
    config.validate()?;
    (0..num_runs)
        .into_par_iter()
        .map(|i| {
            let run_config = config.clone().with_seed(derive_seed(config.seed, i));
            optimize(inst, &run_config)
        })
        .collect()
}
