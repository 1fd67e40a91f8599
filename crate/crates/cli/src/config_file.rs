//! Flat key = value experiment configuration files.
//!
//! Keys mirror the configuration field names exactly; `#` starts a
//! comment and blank lines are skipped. Command-line flags override any
//! value read from the file.
//!
//! ```text
//! n_values = 2,8
//! k_policy = random_per_run      # or fixed:<k>
//! num_runs = 100
//! output_dir = out
//! seed = 42
//! optimizer_kind = ADAM          # or GRADIENT_DESCENT
//! learning_rate = 0.1
//! max_iterations = 300
//! small_change_threshold = 1e-4
//! consecutive_events_required = 5
//! fix_label_angle = false
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use vqsearch::experiment::KPolicy;

/// Values read from a file; `None` means the key was absent.
#[derive(Debug, Default, Clone)]
pub struct PartialConfig {
    pub n_values: Option<Vec<usize>>,
    pub k_policy: Option<KPolicy>,
    pub num_runs: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub optimizer_kind: Option<vqsearch::OptimizerKind>,
    pub learning_rate: Option<f64>,
    pub max_iterations: Option<usize>,
    pub small_change_threshold: Option<f64>,
    pub consecutive_events_required: Option<usize>,
    pub fix_label_angle: Option<bool>,
}

pub fn parse_n_values(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad qubit count {part:?} in n_values"))
        })
        .collect()
}

fn parse_k_policy(text: &str) -> Result<KPolicy> {
    if text.eq_ignore_ascii_case("random_per_run") {
        return Ok(KPolicy::RandomPerRun);
    }
    if let Some(k) = text.strip_prefix("fixed:") {
        let k = k
            .trim()
            .parse::<usize>()
            .map_err(|_| anyhow!("bad index in k_policy {text:?}"))?;
        return Ok(KPolicy::Fixed(k));
    }
    bail!("k_policy must be random_per_run or fixed:<k>, got {text:?}")
}

fn parse_optimizer_kind(text: &str) -> Result<vqsearch::OptimizerKind> {
    match text.to_ascii_uppercase().as_str() {
        "ADAM" => Ok(vqsearch::OptimizerKind::Adam),
        "GRADIENT_DESCENT" => Ok(vqsearch::OptimizerKind::GradientDescent),
        _ => bail!("optimizer_kind must be ADAM or GRADIENT_DESCENT, got {text:?}"),
    }
}

pub fn load(path: &Path) -> Result<PartialConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut config = PartialConfig::default();
    for (line_number, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", line_number + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |what: &str| anyhow!("line {}: bad {what} value {value:?}", line_number + 1);
        match key {
            "n_values" => config.n_values = Some(parse_n_values(value)?),
            "k_policy" => config.k_policy = Some(parse_k_policy(value)?),
            "num_runs" => {
                config.num_runs = Some(value.parse().map_err(|_| parse_err("num_runs"))?)
            }
            "output_dir" => config.output_dir = Some(PathBuf::from(value)),
            "seed" => config.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
            "optimizer_kind" => config.optimizer_kind = Some(parse_optimizer_kind(value)?),
            "learning_rate" => {
                config.learning_rate =
                    Some(value.parse().map_err(|_| parse_err("learning_rate"))?)
            }
            "max_iterations" => {
                config.max_iterations =
                    Some(value.parse().map_err(|_| parse_err("max_iterations"))?)
            }
            "small_change_threshold" => {
                config.small_change_threshold = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err("small_change_threshold"))?,
                )
            }
            "consecutive_events_required" => {
                config.consecutive_events_required = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err("consecutive_events_required"))?,
                )
            }
            "fix_label_angle" => {
                config.fix_label_angle =
                    Some(value.parse().map_err(|_| parse_err("fix_label_angle"))?)
            }
            _ => bail!("line {}: unknown key {key:?}", line_number + 1),
        }
    }
    Ok(config)
}
