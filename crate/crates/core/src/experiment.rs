//! Batch experiments, record files, and box-plot summaries.
//!
//! An experiment runs `num_runs` independent optimizations per register
//! size, writes every run to `records_n<N>.jsonl` (one JSON object per
//! line), and reduces each batch to the five-number summary behind a box
//! plot. Everything is keyed off the base seed: run `i` uses seed
//! `base + i`, and when the marked index is randomized it is drawn from a
//! separate stream of the same per-run seed, so outputs are byte-stable
//! across reruns and thread counts.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::ProblemInstance;
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::state::MAX_QUBITS;
use crate::vqs::{derive_seed, optimize, OptimizerConfig, RunRecord};

/// RNG stream carrying the per-run draw of the marked index, kept apart
/// from stream 0 which seeds the initial angles.
const K_STREAM: u64 = 1;

/// Amplified probability above which a run counts as a success.
pub const SUCCESS_THRESHOLD: f64 = 0.9;
/// Amplified probability below which a run counts as a failure.
pub const FAILURE_THRESHOLD: f64 = 0.1;

/// How the marked index is chosen for each run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    /// Every run searches for the same index.
    Fixed(usize),
    /// Each run draws a fresh index from its own seed.
    RandomPerRun,
}

/// Configuration of a batch experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T: Scalar = f64> {
    /// Data-qubit counts to sweep.
    pub n_values: Vec<usize>,
    pub k_policy: KPolicy,
    pub num_runs: usize,
    pub optimizer: OptimizerConfig<T>,
    pub output_dir: PathBuf,
}

impl<T: Scalar> Default for ExperimentConfig<T> {
    fn default() -> Self {
        Self {
            n_values: vec![2, 8, 14],
            k_policy: KPolicy::RandomPerRun,
            num_runs: 100,
            optimizer: OptimizerConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl<T: Scalar> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Argument("n_values must not be empty".into()));
        }
        for &n in &self.n_values {
            if n + 1 > MAX_QUBITS {
                return Err(Error::Capacity {
                    requested: n + 1,
                    cap: MAX_QUBITS,
                });
            }
            if let KPolicy::Fixed(k) = self.k_policy {
                ProblemInstance::new(n, k)?;
            }
        }
        if self.num_runs == 0 {
            return Err(Error::Argument("num_runs must be at least 1".into()));
        }
        self.optimizer.validate()
    }
}

/// One line of a record file: the run plus the marked index it searched
/// for, which the optimizer itself never sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExperimentRecord<T: Scalar = f64> {
    pub k: usize,
    #[serde(flatten)]
    pub run: RunRecord<T>,
}

/// Five-number summary of a batch plus success/failure counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSummary<T: Scalar = f64> {
    pub n: usize,
    pub count: usize,
    pub min: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub max: T,
    /// Runs with amplified probability above [`SUCCESS_THRESHOLD`].
    pub num_success: usize,
    /// Runs with amplified probability below [`FAILURE_THRESHOLD`].
    pub num_failure: usize,
    pub mean_iterations: f64,
}

/// Quantile by linear interpolation between closest ranks (the inclusive
/// method): position `q * (len - 1)` in the sorted sample.
fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    let position = q * (sorted.len() - 1) as f64;
    let below = position.floor() as usize;
    let above = position.ceil() as usize;
    let fraction = cast::<T>(position - below as f64);
    sorted[below] + (sorted[above] - sorted[below]) * fraction
}

/// Reduce a batch of runs to its box-plot summary.
pub fn summarize<T: Scalar>(records: &[RunRecord<T>]) -> Result<BoxSummary<T>> {
    let first = records
        .first()
        .ok_or_else(|| Error::Argument("no records to summarize".into()))?;
    let n = first.theta_final.len() - 1;
    let mut probabilities: Vec<T> = records.iter().map(|r| r.amplified_probability).collect();
    probabilities.sort_by(|a, b| a.partial_cmp(b).expect("probabilities are finite"));
    let success = cast::<T>(SUCCESS_THRESHOLD);
    let failure = cast::<T>(FAILURE_THRESHOLD);
    Ok(BoxSummary {
        n,
        count: records.len(),
        min: probabilities[0],
        q1: quantile_sorted(&probabilities, 0.25),
        median: quantile_sorted(&probabilities, 0.5),
        q3: quantile_sorted(&probabilities, 0.75),
        max: probabilities[probabilities.len() - 1],
        num_success: probabilities.iter().filter(|&&p| p > success).count(),
        num_failure: probabilities.iter().filter(|&&p| p < failure).count(),
        mean_iterations: records.iter().map(|r| r.iterations_used as f64).sum::<f64>()
            / records.len() as f64,
    })
}

/// Draw the marked index for a run from its seed.
fn draw_k(seed: u64, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(K_STREAM);
    rng.gen_range(0..(1usize << n))
}

fn run_one<T: Scalar>(
    n: usize,
    index: usize,
    config: &ExperimentConfig<T>,
) -> Result<ExperimentRecord<T>> {
    let seed = derive_seed(config.optimizer.seed, index);
    let k = match config.k_policy {
        KPolicy::Fixed(k) => k,
        KPolicy::RandomPerRun => draw_k(seed, n),
    };
    let inst = ProblemInstance::new(n, k)?;
    let run = optimize(&inst, &config.optimizer.clone().with_seed(seed))?;
    Ok(ExperimentRecord { k, run })
}

/// Run the batch for one register size. Parallel over runs; output order
/// follows run index.
pub fn run_batch_records<T: Scalar>(
    n: usize,
    config: &ExperimentConfig<T>,
) -> Result<Vec<ExperimentRecord<T>>> {
    (0..config.num_runs)
        .into_par_iter()
        .map(|i| run_one(n, i, config))
        .collect()
}

/// Execute the full experiment: per register size, run the batch, write
/// `records_n<N>.jsonl` under the output directory, and summarize.
/// Honors `VQSEARCH_THREADS` as a cap on worker threads.
pub fn run_experiment<T: Scalar>(config: &ExperimentConfig<T>) -> Result<Vec<BoxSummary<T>>> {
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let pool = thread_pool()?;
    let mut summaries = Vec::with_capacity(config.n_values.len());
    for &n in &config.n_values {
        let records = match &pool {
            Some(pool) => pool.install(|| run_batch_records(n, config))?,
            None => run_batch_records(n, config)?,
        };
        let path = config.output_dir.join(format!("records_n{n}.jsonl"));
        write_records(&path, &records)?;
        let runs: Vec<RunRecord<T>> = records.iter().map(|r| r.run.clone()).collect();
        summaries.push(summarize(&runs)?);
    }
    Ok(summaries)
}

/// Worker pool capped by the `VQSEARCH_THREADS` environment variable, or
/// `None` to use the global pool.
fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("VQSEARCH_THREADS") {
        Err(_) => Ok(None),
        Ok(value) => {
            let threads: usize = value.parse().map_err(|_| {
                Error::Argument(format!("VQSEARCH_THREADS={value:?} is not a thread count"))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
            Ok(Some(pool))
        }
    }
}

/// Write records as JSON lines.
pub fn write_records<T: Scalar>(path: &Path, records: &[ExperimentRecord<T>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a record file written by [`write_records`].
pub fn read_records<T: Scalar>(path: &Path) -> Result<Vec<ExperimentRecord<T>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// Output layout for plot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    /// Header row plus one comma-separated row per summary.
    Csv,
    /// Whitespace columns `n q1 min max q3 median count mean_iterations`,
    /// the candlestick order: plot columns 1:2:3:4:5 as the box and
    /// whiskers, column 6 as the median line.
    Gnuplot,
}

/// Render summaries in a form external plotting tools can consume.
pub fn emit_plot_data<T: Scalar, W: Write>(
    summaries: &[BoxSummary<T>],
    format: PlotFormat,
    out: &mut W,
) -> Result<()> {
    if summaries.is_empty() {
        return Err(Error::Argument("no summaries to emit".into()));
    }
    match format {
        PlotFormat::Csv => {
            writeln!(
                out,
                "n,count,min,q1,median,q3,max,num_success,num_failure,mean_iterations"
            )?;
            for s in summaries {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    s.n,
                    s.count,
                    s.min,
                    s.q1,
                    s.median,
                    s.q3,
                    s.max,
                    s.num_success,
                    s.num_failure,
                    s.mean_iterations
                )?;
            }
        }
        PlotFormat::Gnuplot => {
            writeln!(out, "# n q1 min max q3 median count mean_iterations")?;
            for s in summaries {
                writeln!(
                    out,
                    "{} {} {} {} {} {} {} {}",
                    s.n, s.q1, s.min, s.max, s.q3, s.median, s.count, s.mean_iterations
                )?;
            }
        }
    }
    Ok(())
}
