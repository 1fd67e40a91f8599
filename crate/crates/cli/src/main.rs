//! Command-line harness: circuit construction, batch experiments,
//! verification suites, reachability reports, and plot-data emission.
//!
//! Exit codes: 0 on success, 1 when a check fails or execution errors,
//! 2 on usage errors.

mod config_file;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use vqsearch::circuit::{
    build_hx_layer, build_oracle, build_ry_layer, build_superposition, ProblemInstance,
};
use vqsearch::experiment::{
    emit_plot_data, read_records, run_experiment, summarize, BoxSummary, ExperimentConfig,
    KPolicy, PlotFormat,
};
use vqsearch::reachability::{
    constructed_reachability, empirical_reachability, ReachabilityDefinition, ReachabilityReport,
};
use vqsearch::verify::{all_passed, unit_row_outcome, verify_suite, VerifyOptions};
use vqsearch::vqs::RunRecord;
use vqsearch::{Circuit, OptimizerKind};

/// Data-qubit counts above this need --allow-slow on run-vqs.
const SLOW_N: usize = 14;

#[derive(Parser)]
#[command(name = "vqsearch", version, about = "Statevector search simulator and variational harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the full pipeline circuit (superposition, oracle, layer) as
    /// one gate per line.
    BuildCircuit(BuildCircuitArgs),
    /// Run batch optimization experiments and write record files.
    RunVqs(RunVqsArgs),
    /// Check the uniform-row position of every layer matrix up to a
    /// register size, emitting a CSV report.
    VerifyAll1row(VerifyAll1rowArgs),
    /// Report the reachability of the depth-1 Ry ansatz.
    Reachability(ReachabilityArgs),
    /// Run the full deterministic self-check suite.
    Verify(VerifyArgs),
    /// Reduce record files to box-plot columns.
    PlotData(PlotDataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerChoice {
    Hx,
    Ry,
}

#[derive(Args)]
struct BuildCircuitArgs {
    /// Data-qubit count.
    #[arg(long)]
    n: usize,
    /// Marked element index.
    #[arg(long)]
    k: usize,
    /// Which amplification layer closes the circuit.
    #[arg(long, value_enum)]
    layer: LayerChoice,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerChoice {
    Adam,
    GradientDescent,
}

#[derive(Args)]
struct RunVqsArgs {
    /// Flat key = value config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated data-qubit counts, e.g. 2,8,14.
    #[arg(long)]
    n_values: Option<String>,
    /// Fix the marked index for every run.
    #[arg(long, conflicts_with = "random_k")]
    k: Option<usize>,
    /// Draw a fresh marked index per run (the default policy).
    #[arg(long)]
    random_k: bool,
    #[arg(long)]
    num_runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    small_change_threshold: Option<f64>,
    #[arg(long)]
    consecutive_events_required: Option<usize>,
    #[arg(long, value_enum)]
    optimizer: Option<OptimizerChoice>,
    /// Hold the label-qubit angle at pi instead of training it.
    #[arg(long)]
    fix_label_angle: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Permit data-qubit counts above 14 (hours of runtime).
    #[arg(long)]
    allow_slow: bool,
}

#[derive(Args)]
struct VerifyAll1rowArgs {
    /// Largest data-qubit count to sweep exhaustively.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Write the CSV report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefinitionChoice {
    /// Ratio of signed minima.
    Signed,
    /// Ratio of absolute maxima (recommended).
    Absolute,
}

#[derive(Args)]
struct ReachabilityArgs {
    /// Data-qubit count.
    #[arg(long)]
    n: usize,
    /// Marked index for the constructed-layer report (any index gives
    /// the same score).
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Score a record file instead of the constructed layer.
    #[arg(long)]
    from_records: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DefinitionChoice::Absolute)]
    definition: DefinitionChoice,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest register swept by the uniform-row check.
    #[arg(long, default_value_t = 10)]
    all1row_n_max: usize,
    /// Largest register checked for constructed reachability.
    #[arg(long, default_value_t = 12)]
    reachability_n_max: usize,
    /// Negative control: offset one Ry factor by this angle, which must
    /// make the uniform-row check fail.
    #[arg(long)]
    perturb_ry: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatChoice {
    Csv,
    Gnuplot,
}

#[derive(Args)]
struct PlotDataArgs {
    /// Record file(s), one per register size.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying usage-error semantics (exit code 2).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::BuildCircuit(args) => build_circuit(args),
        Command::RunVqs(args) => run_vqs(args),
        Command::VerifyAll1row(args) => verify_all1row(args),
        Command::Reachability(args) => reachability(args),
        Command::Verify(args) => verify(args),
        Command::PlotData(args) => plot_data(args),
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn build_circuit(args: BuildCircuitArgs) -> Result<ExitCode> {
    let inst = ProblemInstance::new(args.n, args.k).map_err(|e| usage(e.to_string()))?;
    let mut full: Circuit = Circuit::new(inst.total_qubits());
    let layer = match args.layer {
        LayerChoice::Hx => build_hx_layer(&inst),
        LayerChoice::Ry => build_ry_layer(&inst),
    };
    for part in [build_superposition(&inst), build_oracle(&inst), layer] {
        for gate in part.gates() {
            full.push(gate.clone())?;
        }
    }
    write_output(args.out.as_ref(), &full.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn run_vqs(args: RunVqsArgs) -> Result<ExitCode> {
    let file = match &args.config {
        Some(path) => config_file::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => config_file::PartialConfig::default(),
    };

    let mut config = ExperimentConfig::<f64>::default();
    if let Some(v) = file.n_values {
        config.n_values = v;
    }
    if let Some(v) = file.k_policy {
        config.k_policy = v;
    }
    if let Some(v) = file.num_runs {
        config.num_runs = v;
    }
    if let Some(v) = file.output_dir {
        config.output_dir = v;
    }
    if let Some(v) = file.seed {
        config.optimizer.seed = v;
    }
    if let Some(v) = file.optimizer_kind {
        config.optimizer.optimizer_kind = v;
    }
    if let Some(v) = file.learning_rate {
        config.optimizer.learning_rate = v;
    }
    if let Some(v) = file.max_iterations {
        config.optimizer.max_iterations = v;
    }
    if let Some(v) = file.small_change_threshold {
        config.optimizer.small_change_threshold = v;
    }
    if let Some(v) = file.consecutive_events_required {
        config.optimizer.consecutive_events_required = v;
    }
    if let Some(v) = file.fix_label_angle {
        config.optimizer.fix_label_angle = v;
    }

    if let Some(text) = &args.n_values {
        config.n_values = config_file::parse_n_values(text).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(k) = args.k {
        config.k_policy = KPolicy::Fixed(k);
    } else if args.random_k {
        config.k_policy = KPolicy::RandomPerRun;
    }
    if let Some(v) = args.num_runs {
        config.num_runs = v;
    }
    if let Some(v) = args.seed {
        config.optimizer.seed = v;
    }
    if let Some(v) = args.learning_rate {
        config.optimizer.learning_rate = v;
    }
    if let Some(v) = args.max_iterations {
        config.optimizer.max_iterations = v;
    }
    if let Some(v) = args.small_change_threshold {
        config.optimizer.small_change_threshold = v;
    }
    if let Some(v) = args.consecutive_events_required {
        config.optimizer.consecutive_events_required = v;
    }
    if let Some(choice) = args.optimizer {
        config.optimizer.optimizer_kind = match choice {
            OptimizerChoice::Adam => OptimizerKind::Adam,
            OptimizerChoice::GradientDescent => OptimizerKind::GradientDescent,
        };
    }
    if args.fix_label_angle {
        config.optimizer.fix_label_angle = true;
    }
    if let Some(v) = args.output_dir {
        config.output_dir = v;
    }

    config.validate().map_err(|e| usage(e.to_string()))?;
    if !args.allow_slow {
        if let Some(&n) = config.n_values.iter().find(|&&n| n > SLOW_N) {
            return Err(usage(format!(
                "{n} data qubits takes hours at desk scale; pass --allow-slow to run it"
            )));
        }
    }

    let summaries = run_experiment(&config)?;
    let mut stdout = std::io::stdout().lock();
    emit_plot_data(&summaries, PlotFormat::Csv, &mut stdout)?;
    stdout.flush()?;
    for summary in &summaries {
        eprintln!(
            "wrote {}",
            config
                .output_dir
                .join(format!("records_n{}.jsonl", summary.n))
                .display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_all1row(args: VerifyAll1rowArgs) -> Result<ExitCode> {
    if args.n_max == 0 || args.n_max > 12 {
        return Err(usage("--n-max must be in 1..=12"));
    }
    let mut report = String::from("n,k,layer,row,sign,predicted_amplitude,pass\n");
    let mut failures = 0usize;
    for n in 1..=args.n_max {
        for k in 0..(1usize << n) {
            let inst = ProblemInstance::new(n, k)?;
            for (kind, name) in [
                (vqsearch::analysis::LayerKind::Hx, "hx"),
                (vqsearch::analysis::LayerKind::Ry, "ry"),
            ] {
                match unit_row_outcome::<f64>(&inst, kind, None) {
                    Ok((row, sign, amplitude, ok)) => {
                        let sign = if sign == vqsearch::analysis::Sign::Plus { 1 } else { -1 };
                        report.push_str(&format!(
                            "{n},{k},{name},{row},{sign},{amplitude},{ok}\n"
                        ));
                        if !ok {
                            failures += 1;
                        }
                    }
                    Err(message) => {
                        report.push_str(&format!("{n},{k},{name},,,\"{message}\",false\n"));
                        failures += 1;
                    }
                }
            }
        }
    }
    write_output(args.out.as_ref(), &report)?;
    if failures > 0 {
        eprintln!("{failures} instances failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(report: &ReachabilityReport) {
    println!(
        "{},{},{},{},{},{}",
        report.n,
        report.definition.name(),
        report.ansatz_extremal_value,
        report.hilbert_extremal_value,
        report.reachability,
        if report.upper_bound { "upper_bound" } else { "exact" }
    );
}

fn reachability(args: ReachabilityArgs) -> Result<ExitCode> {
    match &args.from_records {
        Some(path) => {
            let records = read_records::<f64>(path)?;
            let runs: Vec<RunRecord> = records.into_iter().map(|r| r.run).collect();
            let report = empirical_reachability(&runs, args.n)?;
            print_report(&report);
        }
        None => {
            let inst = ProblemInstance::new(args.n, args.k).map_err(|e| usage(e.to_string()))?;
            let mut report = constructed_reachability::<f64>(&inst)?;
            if let DefinitionChoice::Signed = args.definition {
                let value = -report.ansatz_extremal_value;
                report = ReachabilityReport {
                    definition: ReachabilityDefinition::SignedMin,
                    hilbert_extremal_value: vqsearch::reachability::hilbert_extremal(
                        args.n,
                        ReachabilityDefinition::SignedMin,
                    )?,
                    reachability: vqsearch::reachability::reachability_from_extremal(
                        value,
                        args.n,
                        ReachabilityDefinition::SignedMin,
                    )?,
                    ansatz_extremal_value: value,
                    ..report
                };
            }
            print_report(&report);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    if args.all1row_n_max == 0 || args.all1row_n_max > 12 {
        return Err(usage("--all1row-n-max must be in 1..=12"));
    }
    let options = VerifyOptions::<f64> {
        all1row_n_max: args.all1row_n_max,
        reachability_n_max: args.reachability_n_max,
        perturb_ry: args.perturb_ry,
    };
    let checks = verify_suite(&options)?;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", check.name, check.details);
    }
    if all_passed(&checks) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn plot_data(args: PlotDataArgs) -> Result<ExitCode> {
    let mut summaries: Vec<BoxSummary> = Vec::new();
    for path in &args.input {
        let records = read_records::<f64>(path)?;
        let runs: Vec<RunRecord> = records.into_iter().map(|r| r.run).collect();
        summaries.push(summarize(&runs)?);
    }
    let format = match args.format {
        FormatChoice::Csv => PlotFormat::Csv,
        FormatChoice::Gnuplot => PlotFormat::Gnuplot,
    };
    let mut rendered = Vec::new();
    emit_plot_data(&summaries, format, &mut rendered)?;
    write_output(args.out.as_ref(), &String::from_utf8(rendered)?)?;
    Ok(ExitCode::SUCCESS)
}
