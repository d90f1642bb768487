//! Dataset generation and experiment execution.

use std::fmt::Write as FmtWrite;
use std::path::{Path, PathBuf};

use qcl_core::continual::{run_seeds, RunResult, StrategyKind};
use qcl_core::dataset::{gen_task, TaskDataset};

use crate::config::ExperimentConfig;
use crate::csv::{CURVES_FILE, CURVES_HEADER, SUMMARY_FILE, SUMMARY_HEADER};
use crate::error::{CliError, Result};

/// Qubit counts the generator accepts: the cluster chain needs 3+, and the
/// two-copy CE computation is kept to sizes where it stays cheap.
pub const NQ_RANGE: std::ops::RangeInclusive<usize> = 3..=10;

pub fn dataset_path(data_dir: &Path, task_id: u8) -> PathBuf {
    data_dir.join(format!("task{task_id}.qcld"))
}

fn check_nq(n_qubits: usize) -> Result<()> {
    if !NQ_RANGE.contains(&n_qubits) {
        return Err(CliError::Config(format!(
            "qubit count {n_qubits} outside supported range {}..={}",
            NQ_RANGE.start(),
            NQ_RANGE.end()
        )));
    }
    Ok(())
}

/// `gen --task T --seed S --out PATH`
pub fn cmd_gen_single(task_id: u8, n_qubits: usize, seed: u64, out: &Path) -> Result<()> {
    check_nq(n_qubits)?;
    if !(1..=6).contains(&task_id) {
        return Err(CliError::Config(format!("task id {task_id} outside 1..6")));
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Data(e.to_string()))?;
    }
    let ds = gen_task(task_id, n_qubits, seed)?;
    ds.save(out)?;
    eprintln!("wrote task {task_id} ({} samples) to {}", ds.sample_count(), out.display());
    Ok(())
}

/// `gen --all --seed S --data-dir DIR`
pub fn cmd_gen_all(n_qubits: usize, seed: u64, data_dir: &Path) -> Result<()> {
    check_nq(n_qubits)?;
    std::fs::create_dir_all(data_dir).map_err(|e| CliError::Data(e.to_string()))?;
    for task_id in 1..=6u8 {
        let path = dataset_path(data_dir, task_id);
        let ds = gen_task(task_id, n_qubits, seed)?;
        ds.save(&path)?;
        eprintln!("wrote task {task_id} ({} samples) to {}", ds.sample_count(), path.display());
    }
    Ok(())
}

/// Load and validate the datasets a config's sequence refers to.
pub fn load_sequence_datasets(cfg: &ExperimentConfig) -> Result<Vec<TaskDataset>> {
    let mut datasets = Vec::with_capacity(cfg.sequence.len());
    for &task_id in &cfg.sequence {
        let path = dataset_path(&cfg.data_dir, task_id);
        if !path.exists() {
            return Err(CliError::Data(format!(
                "dataset file {} is missing (run `qcl gen` first)",
                path.display()
            )));
        }
        let ds = TaskDataset::load(&path, task_id)?;
        ds.validate_counts()?;
        datasets.push(ds);
    }
    let n_qubits = datasets[0].n_qubits;
    if datasets.iter().any(|d| d.n_qubits != n_qubits) {
        return Err(CliError::Data("datasets disagree on qubit count".into()));
    }
    Ok(datasets)
}

/// Everything `run` produced for one strategy.
pub struct StrategyRuns {
    pub kind: StrategyKind,
    pub results: Vec<RunResult>,
    pub best: usize,
}

impl StrategyRuns {
    pub fn best_result(&self) -> &RunResult {
        &self.results[self.best]
    }
}

/// `run --config FILE`: execute every configured strategy over the shared
/// seed list, then write the curve CSV, the summary CSV, and a parameter
/// checkpoint of each strategy's best run.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Vec<StrategyRuns>> {
    let datasets = load_sequence_datasets(cfg)?;
    let ordered: Vec<&TaskDataset> = datasets.iter().collect();
    let run_cfg = cfg.run_config();

    let mut all = Vec::new();
    for &kind in &cfg.strategies {
        let strategy = cfg.strategy_config(kind);
        let (results, best) = run_seeds(&ordered, &strategy, &run_cfg, &cfg.seeds)?;
        eprintln!(
            "{}: best seed {} with ACC {:.4}",
            kind.name(),
            results[best].seed,
            results[best].matrix.acc()
        );
        all.push(StrategyRuns { kind, results, best });
    }
    write_outputs(cfg, &all)?;
    Ok(all)
}

fn write_outputs(cfg: &ExperimentConfig, all: &[StrategyRuns]) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::Data(e.to_string()))?;
    let sequence = cfg.sequence_string();

    let mut curves = String::from(CURVES_HEADER);
    curves.push('\n');
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');

    for runs in all {
        let name = runs.kind.name();
        for result in &runs.results {
            for point in &result.curves {
                writeln!(
                    curves,
                    "{sequence},{name},{},{},{},{},{}",
                    result.seed, point.position, point.iteration, point.task_id, point.accuracy
                )
                .expect("writing to a string cannot fail");
            }
            for i in 0..result.matrix.n_tasks() {
                for j in 0..=i {
                    writeln!(
                        summary,
                        "{sequence},{name},{},{},{},{}",
                        result.seed,
                        cfg.sequence[i],
                        cfg.sequence[j],
                        result.matrix.get(i, j)
                    )
                    .expect("writing to a string cannot fail");
                }
            }
        }
    }

    std::fs::write(cfg.out_dir.join(CURVES_FILE), curves)
        .map_err(|e| CliError::Data(e.to_string()))?;
    std::fs::write(cfg.out_dir.join(SUMMARY_FILE), summary)
        .map_err(|e| CliError::Data(e.to_string()))?;

    for runs in all {
        let best = runs.best_result();
        let path = cfg
            .out_dir
            .join(format!("checkpoint_{}_seed{}.qclp", runs.kind.name(), best.seed));
        best.final_params.save(&path)?;
    }
    Ok(())
}
