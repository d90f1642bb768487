//! Flat key=value experiment configuration.
//!
//! Recognized keys (all optional, '#' starts a comment):
//!
//! ```text
//! sequence=234561          # task training order, distinct digits from 1..6
//! strategies=plain,ewc,gem # any subset, run in the listed order
//! lambda=10.0              # EWC anchor strength
//! n_layers=1
//! lr=0.1
//! batch_size=10
//! epochs_per_task=1
//! seeds=1,2,3,4,5
//! memory_size=50           # GEM episodic memory capacity
//! fisher_samples=50        # samples behind each EWC Fisher estimate
//! data_dir=data
//! out_dir=out
//! ```

use std::path::{Path, PathBuf};

use qcl_core::continual::{RunConfig, StrategyConfig, StrategyKind, TrainConfig};

use crate::error::{CliError, Result};

/// EWC penalty weight used when a config does not set one.
pub const DEFAULT_LAMBDA: f64 = 10.0;
/// Seed list used when a config does not set one.
pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub sequence: Vec<u8>,
    pub strategies: Vec<StrategyKind>,
    pub lambda: f64,
    pub n_layers: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs_per_task: usize,
    pub seeds: Vec<u64>,
    pub memory_size: usize,
    pub fisher_samples: usize,
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sequence: vec![1, 2, 3, 4, 5, 6],
            strategies: vec![StrategyKind::Plain, StrategyKind::Ewc, StrategyKind::Gem],
            lambda: DEFAULT_LAMBDA,
            n_layers: 1,
            lr: 0.1,
            batch_size: 10,
            epochs_per_task: 1,
            seeds: DEFAULT_SEEDS.to_vec(),
            memory_size: 50,
            fisher_samples: 50,
            data_dir: PathBuf::from("data"),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |detail: String| CliError::Config(format!("line {}: {detail}", lineno + 1));
            match key {
                "sequence" => cfg.sequence = parse_sequence(value).map_err(bad)?,
                "strategies" => {
                    let mut out = Vec::new();
                    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        out.push(part.parse::<StrategyKind>().map_err(&bad)?);
                    }
                    if out.is_empty() {
                        return Err(bad("no strategies listed".into()));
                    }
                    cfg.strategies = out;
                }
                "lambda" => cfg.lambda = parse_num(value, "lambda").map_err(&bad)?,
                "n_layers" => cfg.n_layers = parse_num(value, "n_layers").map_err(&bad)?,
                "lr" => cfg.lr = parse_num(value, "lr").map_err(&bad)?,
                "batch_size" => cfg.batch_size = parse_num(value, "batch_size").map_err(&bad)?,
                "epochs_per_task" => {
                    cfg.epochs_per_task = parse_num(value, "epochs_per_task").map_err(&bad)?
                }
                "seeds" => {
                    let mut seeds = Vec::new();
                    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        seeds.push(parse_num::<u64>(part, "seed").map_err(&bad)?);
                    }
                    if seeds.is_empty() {
                        return Err(bad("no seeds listed".into()));
                    }
                    cfg.seeds = seeds;
                }
                "memory_size" => cfg.memory_size = parse_num(value, "memory_size").map_err(&bad)?,
                "fisher_samples" => {
                    cfg.fisher_samples = parse_num(value, "fisher_samples").map_err(&bad)?
                }
                "data_dir" => cfg.data_dir = PathBuf::from(value),
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(CliError::Config("lambda must be non-negative".into()));
        }
        if self.n_layers == 0 {
            return Err(CliError::Config("n_layers must be at least 1".into()));
        }
        if !(self.lr > 0.0) {
            return Err(CliError::Config("lr must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(CliError::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn strategy_config(&self, kind: StrategyKind) -> StrategyConfig {
        StrategyConfig {
            kind,
            lambda: self.lambda,
            memory_size: self.memory_size,
            fisher_samples: self.fisher_samples,
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            n_layers: self.n_layers,
            lr: self.lr,
            train: TrainConfig {
                batch_size: self.batch_size,
                epochs_per_task: self.epochs_per_task,
            },
        }
    }

    pub fn sequence_string(&self) -> String {
        self.sequence.iter().map(|t| t.to_string()).collect()
    }
}

/// A sequence is a non-empty string of distinct task digits 1..6 — the full
/// six-task permutation in real experiments, any subset for smoke runs.
pub fn parse_sequence(s: &str) -> std::result::Result<Vec<u8>, String> {
    let mut out = Vec::new();
    for c in s.chars() {
        let d = c.to_digit(10).filter(|d| (1..=6).contains(d));
        match d {
            Some(d) => out.push(d as u8),
            None => return Err(format!("sequence character '{c}' is not a task id 1..6")),
        }
    }
    if out.is_empty() {
        return Err("sequence is empty".into());
    }
    let mut seen = [false; 7];
    for &t in &out {
        if seen[t as usize] {
            return Err(format!("task {t} appears twice in the sequence"));
        }
        seen[t as usize] = true;
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(value: &str, key: &str) -> std::result::Result<T, String> {
    value.parse::<T>().map_err(|_| format!("invalid {key} value '{value}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = ExperimentConfig::parse(
            "sequence=234561\nstrategies=gem\nlambda=2.5\nseeds=7,8\n# comment\nlr=0.05\n",
        )
        .unwrap();
        assert_eq!(cfg.sequence, vec![2, 3, 4, 5, 6, 1]);
        assert_eq!(cfg.strategies, vec![StrategyKind::Gem]);
        assert_eq!(cfg.seeds, vec![7, 8]);
        assert_eq!(cfg.lambda, 2.5);
        assert_eq!(cfg.lr, 0.05);
        assert_eq!(cfg.batch_size, 10);
    }

    #[test]
    fn rejects_bad_sequences_and_keys() {
        assert!(matches!(
            ExperimentConfig::parse("sequence=1231\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("sequence=17\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("mystery=1\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("batch_size=0\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("strategies=sgd\n"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn epochs_zero_is_allowed() {
        let cfg = ExperimentConfig::parse("epochs_per_task=0\n").unwrap();
        assert_eq!(cfg.epochs_per_task, 0);
    }

    #[test]
    fn default_sequence_is_lexical() {
        assert_eq!(ExperimentConfig::default().sequence, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(ExperimentConfig::default().sequence_string(), "123456");
    }
}
