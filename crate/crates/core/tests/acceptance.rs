//! Acceptance suite: one test per criterion, each printing a PASS line
//! with measured values once its assertions hold (run with
//! `--nocapture` to see them). Criteria with a runtime budget print
//! their elapsed time as evidence.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vqsearch::analysis::{
    expected_ry_sign, kron_chain, layer_matrix, locate_signed_unit_row, LayerKind, Sign,
};
use vqsearch::circuit::{constructed_angles, prepare_search_state, run_pipeline, Layer};
use vqsearch::experiment::{
    read_records, run_experiment, summarize, ExperimentConfig, KPolicy,
};
use vqsearch::gate::{h_matrix, xh_matrix};
use vqsearch::reachability::{constructed_reachability, empirical_reachability};
use vqsearch::verify::EXPECTED_PROBABILITIES_4DP;
use vqsearch::vqs::{gradient, objective, optimize, optimize_with_initial, run_batch};
use vqsearch::{
    Error, OptimizerConfig, OptimizerKind, ProblemInstance, RunRecord, StateVector,
    TerminationReason,
};

const TAU: f64 = std::f64::consts::TAU;

fn pass(name: &str, detail: String) {
    println!("[acceptance] {name}: PASS ({detail})");
}

/// Criterion 1 — the pipeline's success probability matches the
/// four-decimal table (1 - 1/2^n)^2 for n = 1..9 under both constructed
/// layers, exhaustively in k for n <= 6 and on 10 sampled k above.
#[test]
fn a01_probability_table() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut instances = 0usize;
    for n in 1..=9usize {
        let ks: Vec<usize> = if n <= 6 {
            (0..(1 << n)).collect()
        } else {
            (0..10).map(|_| rng.gen_range(0..(1usize << n))).collect()
        };
        let expected = EXPECTED_PROBABILITIES_4DP[n - 1];
        for k in ks {
            let inst = ProblemInstance::new(n, k).unwrap();
            for layer in [Layer::Hx, Layer::RyConstructed] {
                let out = run_pipeline::<f64>(&inst, &layer).unwrap();
                let deviation = (out.p_good - expected).abs();
                assert!(
                    deviation < 5e-5,
                    "n={n} k={k} {layer:?}: p={} vs {expected}",
                    out.p_good
                );
                worst = worst.max(deviation);
                instances += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    pass(
        "a01 probability table",
        format!("{instances} pipeline runs, max deviation {worst:.2e}, {elapsed:?}"),
    );
}

/// Criterion 2 — the three-factor product chain XH ⊗ H ⊗ XH, rescaled by
/// 2*sqrt(2), reproduces the expected 8x8 sign matrix entrywise.
#[test]
fn a02_three_factor_sign_matrix() {
    #[rustfmt::skip]
    let expected: [[f64; 8]; 8] = [
        [1.0, -1.0,  1.0, -1.0, -1.0,  1.0, -1.0,  1.0],
        [1.0,  1.0,  1.0,  1.0, -1.0, -1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0,  1.0, -1.0,  1.0,  1.0, -1.0],
        [1.0,  1.0, -1.0, -1.0, -1.0, -1.0,  1.0,  1.0],
        [1.0, -1.0,  1.0, -1.0,  1.0, -1.0,  1.0, -1.0],
        [1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0,  1.0],
        [1.0, -1.0, -1.0,  1.0,  1.0, -1.0, -1.0,  1.0],
        [1.0,  1.0, -1.0, -1.0,  1.0,  1.0, -1.0, -1.0],
    ];
    let to_array = |m: [[f64; 2]; 2]| ndarray::array![[m[0][0], m[0][1]], [m[1][0], m[1][1]]];
    let chain = kron_chain(&[
        to_array(xh_matrix()),
        to_array(h_matrix()),
        to_array(xh_matrix()),
    ])
    .unwrap();
    let scale = 2.0 * std::f64::consts::SQRT_2;
    let mut worst = 0.0f64;
    for i in 0..8 {
        for j in 0..8 {
            let deviation = (chain[[i, j]] * scale - expected[i][j]).abs();
            assert!(deviation < 1e-9, "entry ({i},{j})");
            worst = worst.max(deviation);
        }
    }
    pass(
        "a02 three-factor sign matrix",
        format!("64 entries at scale 2*sqrt(2), max deviation {worst:.2e}"),
    );
}

/// Criterion 3 — for every n in 1..=10 and every k, the H/X layer matrix
/// has its unique all-plus row at row k, and the Ry layer matrix has its
/// unique uniform row at row k with sign fixed by the parity of the
/// Ry(3pi/2) factor count. 2046 instances, zero failures.
#[test]
fn a03_unit_row_theorem_brute_force() {
    let start = Instant::now();
    let mut instances = Vec::new();
    for n in 1..=10usize {
        for k in 0..(1usize << n) {
            instances.push(ProblemInstance::new(n, k).unwrap());
        }
    }
    assert_eq!(instances.len(), 2046);
    let failures: usize = instances
        .par_iter()
        .map(|inst| {
            let mut bad = 0usize;
            let hx = layer_matrix::<f64>(inst, LayerKind::Hx).unwrap();
            if locate_signed_unit_row(&hx).unwrap() != (inst.k(), Sign::Plus) {
                bad += 1;
            }
            let ry = layer_matrix::<f64>(inst, LayerKind::Ry).unwrap();
            if locate_signed_unit_row(&ry).unwrap() != (inst.k(), expected_ry_sign(inst)) {
                bad += 1;
            }
            bad
        })
        .sum();
    assert_eq!(failures, 0);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60 s");
    pass(
        "a03 unit-row theorem",
        format!("2046 instances x 2 layers, 0 failures, {elapsed:?}"),
    );
}

/// Criterion 4 — the constructed layer's reachability equals 1/2^n to
/// 1e-12 for n = 1..=12, and any record set containing the constructed
/// angles scores at most 1/2^n + 1e-12.
#[test]
fn a04_reachability_bound() {
    let mut worst = 0.0f64;
    for n in 1..=12usize {
        for k in [0usize, (1 << n) / 2, (1 << n) - 1] {
            let inst = ProblemInstance::new(n, k).unwrap();
            let report = constructed_reachability::<f64>(&inst).unwrap();
            let deviation = (report.reachability - 1.0 / (1u64 << n) as f64).abs();
            assert!(deviation < 1e-12, "n={n} k={k}: {}", report.reachability);
            worst = worst.max(deviation);
        }
    }

    // Empirical form over records that include the constructed angles.
    let inst = ProblemInstance::new(6, 39).unwrap();
    let psi1: StateVector = prepare_search_state(&inst).unwrap();
    let theta = constructed_angles::<f64>(&inst);
    let f = objective(&psi1, &theta).unwrap();
    let constructed_record = RunRecord {
        seed: 0,
        theta_initial: theta.clone(),
        theta_final: theta,
        objective_trace: vec![f],
        iterations_used: 1,
        termination_reason: TerminationReason::SmallChange,
        amplified_probability: inst.num_elements() as f64 * f * f,
    };
    let mut records = vec![constructed_record];
    for seed in [5u64, 6, 7] {
        let config = OptimizerConfig {
            max_iterations: 25,
            seed,
            ..OptimizerConfig::default()
        };
        records.push(optimize(&inst, &config).unwrap());
    }
    let report = empirical_reachability(&records, 6).unwrap();
    let bound = 1.0 / 64.0 + 1e-12;
    assert!(
        report.reachability <= bound,
        "empirical {} above bound {bound}",
        report.reachability
    );
    assert!(report.upper_bound);
    pass(
        "a04 reachability bound",
        format!(
            "constructed max |dev| {worst:.2e} over n=1..12; empirical {:.6} <= 1/64",
            report.reachability
        ),
    );
}

/// Criterion 5 — on 200 random (n <= 6, k, theta) triples the objective
/// equals -psi2[N+k]/sqrt(N) to 1e-12, stays within ±1/sqrt(N), and the
/// amplified probability equals N f^2 to 1e-10.
#[test]
fn a05_objective_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst_identity = 0.0f64;
    let mut worst_probability = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6usize);
        let k = rng.gen_range(0..(1usize << n));
        let inst = ProblemInstance::new(n, k).unwrap();
        let theta: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..TAU)).collect();
        let out = run_pipeline(&inst, &Layer::RyAnsatz(theta.clone())).unwrap();
        let f = objective(&out.psi1, &theta).unwrap();
        let sqrt_n = (inst.num_elements() as f64).sqrt();

        let identity_dev = (f + out.psi2.amp(inst.good_index()).re / sqrt_n).abs();
        assert!(identity_dev < 1e-12);
        assert!(f.abs() <= 1.0 / sqrt_n + 1e-12);
        let probability_dev = (out.p_good - inst.num_elements() as f64 * f * f).abs();
        assert!(probability_dev < 1e-10);

        worst_identity = worst_identity.max(identity_dev);
        worst_probability = worst_probability.max(probability_dev);
    }
    pass(
        "a05 objective identities",
        format!(
            "200 triples, identity dev {worst_identity:.2e}, probability dev {worst_probability:.2e}"
        ),
    );
}

/// Criterion 6 — the shift-rule gradient matches central finite
/// differences (h = 1e-5) within 1e-6 per component on 100 random
/// samples with n <= 6.
#[test]
fn a06_gradient_against_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6usize);
        let k = rng.gen_range(0..(1usize << n));
        let inst = ProblemInstance::new(n, k).unwrap();
        let psi1: StateVector = prepare_search_state(&inst).unwrap();
        let theta: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..TAU)).collect();
        let exact = gradient(&psi1, &theta).unwrap();
        for i in 0..theta.len() {
            let mut shifted = theta.clone();
            shifted[i] = theta[i] + h;
            let plus = objective(&psi1, &shifted).unwrap();
            shifted[i] = theta[i] - h;
            let minus = objective(&psi1, &shifted).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            let deviation = (exact[i] - fd).abs();
            assert!(deviation < 1e-6, "component {i}: {} vs {fd}", exact[i]);
            worst = worst.max(deviation);
        }
    }
    pass(
        "a06 gradient vs finite differences",
        format!("100 samples, max componentwise deviation {worst:.2e}"),
    );
}

/// Criterion 7 — 100 default-config runs at n = 8: at least 60 end with
/// amplified probability above 0.9 and at least 5 below 0.1. Counts
/// depend on the optimizer, so only these loose thresholds are pinned.
#[test]
fn a07_hundred_runs_at_n8() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::<f64> {
        n_values: vec![8],
        k_policy: KPolicy::RandomPerRun,
        num_runs: 100,
        optimizer: OptimizerConfig::default(),
        output_dir: dir.path().to_path_buf(),
    };
    let summaries = run_experiment(&config).unwrap();
    let summary = &summaries[0];
    assert_eq!(summary.count, 100);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "took {elapsed:?}, budget 10 min"
    );
    assert!(
        summary.num_success >= 60,
        "only {} successes above 0.9",
        summary.num_success
    );
    assert!(
        summary.num_failure >= 5,
        "only {} failures below 0.1",
        summary.num_failure
    );
    // Records on disk reproduce the in-memory summary.
    let records = read_records::<f64>(&dir.path().join("records_n8.jsonl")).unwrap();
    let runs: Vec<RunRecord> = records.iter().map(|r| r.run.clone()).collect();
    assert_eq!(&summarize(&runs).unwrap(), summary);
    pass(
        "a07 hundred runs at n=8",
        format!(
            "{} successes > 0.9, {} failures < 0.1, median {:.3}, {elapsed:?}",
            summary.num_success, summary.num_failure, summary.median
        ),
    );
}

/// Closed-form amplified probability for the trainable layer, computed
/// from 2x2 entries only — row N+k of the layer matrix dotted with the
/// post-oracle state. Independent of both the statevector engine and the
/// tensor-chain code, so it can serve as the oracle for criterion 8.
fn closed_form_p_good(n: usize, k: usize, theta: &[f64]) -> f64 {
    let big_n = (1usize << n) as f64;
    let mut row_sum = 1.0f64;
    let mut diagonal = 1.0f64;
    for (r, angle) in theta.iter().take(n).enumerate() {
        let (s, c) = (angle / 2.0).sin_cos();
        // Row k_r of Ry: [c, -s] for bit 0, [s, c] for bit 1. Its diagonal
        // entry is c either way.
        row_sum *= if (k >> r) & 1 == 1 { s + c } else { c - s };
        diagonal *= c;
    }
    let half = theta[n] / 2.0;
    let (s_label, c_label) = half.sin_cos();
    let beta = (s_label * (row_sum - diagonal) + c_label * diagonal) / big_n.sqrt();
    beta * beta
}

/// Best achievable amplified probability for n = 2 and a given k: a full
/// grid at resolution pi/50 over [0, 4pi)^3 locates the global basin,
/// then a nested local grid sharpens the maximum far below the 1e-6
/// comparison margin (the coarse grid alone undershoots the smooth
/// maximum by ~1e-3).
fn grid_oracle_max_p(k: usize) -> f64 {
    let step = std::f64::consts::PI / 50.0;
    let mut best = 0.0f64;
    let mut best_theta = [0.0f64; 3];
    for i0 in 0..200 {
        for i1 in 0..200 {
            for i2 in 0..200 {
                let theta = [i0 as f64 * step, i1 as f64 * step, i2 as f64 * step];
                let p = closed_form_p_good(2, k, &theta);
                if p > best {
                    best = p;
                    best_theta = theta;
                }
            }
        }
    }
    let mut h = step;
    for _ in 0..20 {
        let offsets = [-h, -h / 2.0, 0.0, h / 2.0, h];
        let mut improved_theta = best_theta;
        for &d0 in &offsets {
            for &d1 in &offsets {
                for &d2 in &offsets {
                    let theta = [
                        best_theta[0] + d0,
                        best_theta[1] + d1,
                        best_theta[2] + d2,
                    ];
                    let p = closed_form_p_good(2, k, &theta);
                    if p > best {
                        best = p;
                        improved_theta = theta;
                    }
                }
            }
        }
        best_theta = improved_theta;
        h /= 2.0;
    }
    best
}

/// Criterion 8 — 100 default-config runs at n = 2 have a median amplified
/// probability in [0.40, 0.70], and no run beats the grid-established
/// achievable maximum by more than 1e-6.
#[test]
fn a08_two_qubit_ceiling() {
    // The closed form and the engine agree before it is used as an oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..25 {
        let k = rng.gen_range(0..4usize);
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0 * TAU)).collect();
        let inst = ProblemInstance::new(2, k).unwrap();
        let out = run_pipeline(&inst, &Layer::RyAnsatz(theta.clone())).unwrap();
        assert!((closed_form_p_good(2, k, &theta) - out.p_good).abs() < 1e-12);
    }

    let oracle: Vec<f64> = (0..4).map(grid_oracle_max_p).collect();
    // The achievable maximum is the same for every k (bit flips relabel
    // angles); the four independent searches must agree.
    for k in 1..4 {
        assert!((oracle[k] - oracle[0]).abs() < 1e-9, "oracle mismatch: {oracle:?}");
    }

    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::<f64> {
        n_values: vec![2],
        k_policy: KPolicy::RandomPerRun,
        num_runs: 100,
        optimizer: OptimizerConfig::default(),
        output_dir: dir.path().to_path_buf(),
    };
    let summaries = run_experiment(&config).unwrap();
    let summary = &summaries[0];
    assert!(
        summary.median >= 0.40 && summary.median <= 0.70,
        "median {} outside [0.40, 0.70]",
        summary.median
    );

    let records = read_records::<f64>(&dir.path().join("records_n2.jsonl")).unwrap();
    let mut worst_excess = f64::NEG_INFINITY;
    for record in &records {
        let excess = record.run.amplified_probability - oracle[record.k];
        assert!(
            excess <= 1e-6,
            "run with k={} reached {} above oracle {}",
            record.k,
            record.run.amplified_probability,
            oracle[record.k]
        );
        worst_excess = worst_excess.max(excess);
    }
    pass(
        "a08 two-qubit ceiling",
        format!(
            "median {:.4} in [0.40, 0.70], oracle max {:.6}, worst run-oracle excess {worst_excess:.2e}",
            summary.median, oracle[0]
        ),
    );
}

/// Criterion 9 — a gradient-descent run warm-started at the constructed
/// angles terminates through the small-change rule within
/// consecutive_events_required + 1 iterations, and no run ever exceeds
/// the 300-iteration cap.
#[test]
fn a09_termination_protocol() {
    let inst = ProblemInstance::new(8, 77).unwrap();
    let config = OptimizerConfig::<f64> {
        optimizer_kind: OptimizerKind::GradientDescent,
        ..OptimizerConfig::default()
    };
    let record = optimize_with_initial(&inst, constructed_angles(&inst), &config).unwrap();
    assert_eq!(record.termination_reason, TerminationReason::SmallChange);
    assert!(
        record.iterations_used <= config.consecutive_events_required + 1,
        "warm start used {} iterations",
        record.iterations_used
    );

    let small = ProblemInstance::new(3, 5).unwrap();
    let batch = run_batch::<f64>(&small, &OptimizerConfig::default(), 20).unwrap();
    for run in &batch {
        assert!(run.iterations_used <= 300);
        assert_eq!(run.objective_trace.len(), run.iterations_used);
    }
    pass(
        "a09 termination protocol",
        format!(
            "warm start stopped by SMALL_CHANGE after {} iterations; 20-run batch capped at 300",
            record.iterations_used
        ),
    );
}

/// Criterion 10 — 26 data qubits are refused with a capacity message at
/// desk scale; their behavior is covered analytically by the unit-row
/// and reachability properties (criteria 3 and 4), which hold for every
/// n they can reach. The optional n = 20 statistical check lives in
/// `a10_twenty_qubit_runs_extended` behind `--ignored`.
#[test]
fn a10_capacity_boundary() {
    let err = StateVector::<f64>::zero(27).unwrap_err();
    assert!(matches!(err, Error::Capacity { requested: 27, cap: 24 }));
    assert!(err.to_string().contains("cap is 24"));

    let config = ExperimentConfig::<f64> {
        n_values: vec![26],
        ..ExperimentConfig::default()
    };
    let err = config.validate().unwrap_err();
    assert!(err.to_string().contains("cap is 24"));

    // n = 20 fits the cap and is accepted (without running a batch here).
    let config = ExperimentConfig::<f64> {
        n_values: vec![20],
        ..ExperimentConfig::default()
    };
    assert!(config.validate().is_ok());
    pass(
        "a10 capacity boundary",
        "n=26 refused citing the 24-qubit cap; n=20 accepted for extended runs".to_string(),
    );
}

/// Criterion 10, optional branch — criterion 7's thresholds at n = 20.
/// Hours of runtime; run explicitly with
/// `cargo test -p vqsearch --test acceptance --release -- --ignored`.
#[test]
#[ignore = "extended runtime (hours); see a10_capacity_boundary for the default-scale coverage"]
fn a10_twenty_qubit_runs_extended() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::<f64> {
        n_values: vec![20],
        k_policy: KPolicy::RandomPerRun,
        num_runs: 100,
        optimizer: OptimizerConfig::default(),
        output_dir: dir.path().to_path_buf(),
    };
    let summaries = run_experiment(&config).unwrap();
    let summary = &summaries[0];
    assert!(summary.num_success >= 60);
    assert!(summary.num_failure >= 5);
    pass(
        "a10 twenty-qubit runs",
        format!(
            "{} successes, {} failures",
            summary.num_success, summary.num_failure
        ),
    );
}
