//! Fixed-schema CSV files written by `run` and read back by `report`/`plot`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back yields bit-identical values and repeated runs produce
//! byte-identical output.

use std::path::Path;

use crate::error::{CliError, Result};

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CURVES_HEADER: &str = "sequence,strategy,seed,epoch,iteration,task_id,test_accuracy";
pub const SUMMARY_HEADER: &str = "sequence,strategy,seed,task_learned,task_evaluated,accuracy";

/// One accuracy-matrix entry: accuracy on `task_evaluated` measured right
/// after finishing `task_learned`.
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub sequence: String,
    pub strategy: String,
    pub seed: u64,
    pub task_learned: u8,
    pub task_evaluated: u8,
    pub accuracy: f64,
}

/// One learning-curve point.
#[derive(Clone, Debug)]
pub struct CurveRow {
    pub sequence: String,
    pub strategy: String,
    pub seed: u64,
    pub epoch: usize,
    pub iteration: usize,
    pub task_id: u8,
    pub accuracy: f64,
}

fn split_line<'a>(path: &Path, lineno: usize, line: &'a str, fields: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != fields {
        return Err(CliError::Data(format!(
            "{}:{}: expected {fields} fields, found {}",
            path.display(),
            lineno + 1,
            parts.len()
        )));
    }
    Ok(parts)
}

fn parse<T: std::str::FromStr>(path: &Path, lineno: usize, field: &str, what: &str) -> Result<T> {
    field.parse::<T>().map_err(|_| {
        CliError::Data(format!(
            "{}:{}: invalid {what} '{field}'",
            path.display(),
            lineno + 1
        ))
    })
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SUMMARY_HEADER => {}
        _ => {
            return Err(CliError::Data(format!(
                "{}: missing or unexpected summary header",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_line(path, lineno, line, 6)?;
        rows.push(SummaryRow {
            sequence: f[0].to_string(),
            strategy: f[1].to_string(),
            seed: parse(path, lineno, f[2], "seed")?,
            task_learned: parse(path, lineno, f[3], "task id")?,
            task_evaluated: parse(path, lineno, f[4], "task id")?,
            accuracy: parse(path, lineno, f[5], "accuracy")?,
        });
    }
    Ok(rows)
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CURVES_HEADER => {}
        _ => {
            return Err(CliError::Data(format!(
                "{}: missing or unexpected curves header",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_line(path, lineno, line, 7)?;
        rows.push(CurveRow {
            sequence: f[0].to_string(),
            strategy: f[1].to_string(),
            seed: parse(path, lineno, f[2], "seed")?,
            epoch: parse(path, lineno, f[3], "epoch")?,
            iteration: parse(path, lineno, f[4], "iteration")?,
            task_id: parse(path, lineno, f[5], "task id")?,
            accuracy: parse(path, lineno, f[6], "accuracy")?,
        });
    }
    Ok(rows)
}
