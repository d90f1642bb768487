//! Rebuild accuracy matrices from the summary CSV and print the
//! per-sequence ACC/BWT table (best seed per strategy, all seeds listed).

use std::path::Path;

use qcl_core::metrics::AccuracyMatrix;

use crate::config::parse_sequence;
use crate::csv::{read_summary, SummaryRow, SUMMARY_FILE};
use crate::error::{CliError, Result};

/// Metrics of a single seed's run.
#[derive(Clone, Debug)]
pub struct SeedSummary {
    pub seed: u64,
    pub acc: f64,
    pub bwt: Option<f64>,
}

/// All seeds of one (sequence, strategy) pair, plus the best-ACC pick.
#[derive(Clone, Debug)]
pub struct StrategySummary {
    pub sequence: String,
    pub strategy: String,
    pub seeds: Vec<SeedSummary>,
    pub best: usize,
}

impl StrategySummary {
    pub fn best_seed(&self) -> &SeedSummary {
        &self.seeds[self.best]
    }
}

/// Group summary rows by (sequence, strategy, seed) in order of first
/// appearance, rebuild each accuracy matrix, and recompute ACC/BWT.
pub fn summarize(rows: &[SummaryRow]) -> Result<Vec<StrategySummary>> {
    let mut groups: Vec<(String, String, Vec<(u64, Vec<SummaryRow>)>)> = Vec::new();
    for row in rows {
        let group = match groups
            .iter_mut()
            .find(|(seq, strat, _)| *seq == row.sequence && *strat == row.strategy)
        {
            Some(g) => g,
            None => {
                groups.push((row.sequence.clone(), row.strategy.clone(), Vec::new()));
                groups.last_mut().unwrap()
            }
        };
        match group.2.iter_mut().find(|(seed, _)| *seed == row.seed) {
            Some((_, rows)) => rows.push(row.clone()),
            None => group.2.push((row.seed, vec![row.clone()])),
        }
    }

    let mut out = Vec::new();
    for (sequence, strategy, seeds) in groups {
        let order = parse_sequence(&sequence)
            .map_err(|e| CliError::Data(format!("summary sequence '{sequence}': {e}")))?;
        let position = |task: u8| -> Result<usize> {
            order.iter().position(|&t| t == task).ok_or_else(|| {
                CliError::Data(format!("task {task} not part of sequence {sequence}"))
            })
        };
        let mut summaries = Vec::new();
        for (seed, rows) in seeds {
            let n = order.len();
            let mut grid = vec![vec![None; n]; n];
            for row in &rows {
                let i = position(row.task_learned)?;
                let j = position(row.task_evaluated)?;
                if j > i {
                    return Err(CliError::Data(format!(
                        "summary row above the diagonal: learned {} evaluated {}",
                        row.task_learned, row.task_evaluated
                    )));
                }
                grid[i][j] = Some(row.accuracy);
            }
            let mut matrix = AccuracyMatrix::new();
            for (i, row) in grid.into_iter().enumerate() {
                let mut filled = Vec::with_capacity(i + 1);
                for (j, cell) in row.into_iter().enumerate().take(i + 1) {
                    filled.push(cell.ok_or_else(|| {
                        CliError::Data(format!(
                            "sequence {sequence} strategy {strategy} seed {seed}: \
                             missing accuracy for row {i} column {j}"
                        ))
                    })?);
                }
                matrix.push_row(filled);
            }
            summaries.push(SeedSummary { seed, acc: matrix.acc(), bwt: matrix.bwt() });
        }
        let mut best = 0;
        for (i, s) in summaries.iter().enumerate() {
            if s.acc > summaries[best].acc {
                best = i;
            }
        }
        out.push(StrategySummary { sequence, strategy, seeds: summaries, best });
    }
    Ok(out)
}

fn fmt_metric(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.4}"),
        None => "-".to_string(),
    }
}

/// Render the report table for a set of summaries.
pub fn render(summaries: &[StrategySummary]) -> String {
    const STRATEGIES: [&str; 3] = ["plain", "ewc", "gem"];
    let mut text = String::new();
    text.push_str(&format!("{:<10}", "sequence"));
    for s in STRATEGIES {
        text.push_str(&format!(" {:>11} {:>11}", format!("{s} ACC"), format!("{s} BWT")));
    }
    text.push('\n');

    let mut sequences: Vec<&str> = Vec::new();
    for s in summaries {
        if !sequences.contains(&s.sequence.as_str()) {
            sequences.push(&s.sequence);
        }
    }
    for seq in &sequences {
        text.push_str(&format!("{seq:<10}"));
        for strat in STRATEGIES {
            match summaries
                .iter()
                .find(|s| s.sequence == *seq && s.strategy == strat)
            {
                Some(s) => {
                    let best = s.best_seed();
                    text.push_str(&format!(
                        " {:>11} {:>11}",
                        fmt_metric(Some(best.acc)),
                        fmt_metric(best.bwt)
                    ));
                }
                None => text.push_str(&format!(" {:>11} {:>11}", "-", "-")),
            }
        }
        text.push('\n');
    }

    text.push('\n');
    text.push_str("per-seed ACC (best marked *):\n");
    for s in summaries {
        text.push_str(&format!("  {} {:<6}", s.sequence, s.strategy));
        for (i, seed) in s.seeds.iter().enumerate() {
            let marker = if i == s.best { "*" } else { "" };
            text.push_str(&format!(" seed{}={:.4}{}", seed.seed, seed.acc, marker));
        }
        text.push('\n');
    }
    text
}

/// `report --in DIR`: recompute metrics from DIR/summary.csv and render the table.
pub fn cmd_report(input_dir: &Path) -> Result<String> {
    let rows = read_summary(&input_dir.join(SUMMARY_FILE))?;
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "{} contains no summary rows",
            input_dir.join(SUMMARY_FILE).display()
        )));
    }
    let summaries = summarize(&rows)?;
    Ok(render(&summaries))
}
