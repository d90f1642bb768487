//! Accuracy bookkeeping for task sequences: the lower-triangular accuracy
//! matrix and the ACC / BWT summary metrics computed from it.

use crate::classifier::{predict, ClassifierParams};
use crate::dataset::Sample;

/// Lower-triangular matrix of test accuracies: row i (0-based) holds the
/// accuracy on the first i+1 tasks of the sequence, measured right after
/// training the (i+1)-th. Rows are appended as training progresses, so no
/// undefined cell ever exists.
#[derive(Clone, Debug, Default)]
pub struct AccuracyMatrix {
    rows: Vec<Vec<f64>>,
}

impl AccuracyMatrix {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Append the accuracies measured after finishing the next task. Row i
    /// must contain i+1 entries (tasks evaluated in sequence order).
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.rows.len() + 1, "row length must equal task count");
        for &a in &row {
            assert!((0.0..=1.0).contains(&a), "accuracy {a} outside [0, 1]");
        }
        self.rows.push(row);
    }

    pub fn n_tasks(&self) -> usize {
        self.rows.len()
    }

    /// Accuracy on sequence position `j` after learning position `i` (0-based, j ≤ i).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(j <= i, "cell ({i}, {j}) above the diagonal is undefined");
        self.rows[i][j]
    }

    /// Mean accuracy over all tasks after the last one was learned.
    pub fn acc(&self) -> f64 {
        let last = self.rows.last().expect("empty accuracy matrix");
        last.iter().sum::<f64>() / last.len() as f64
    }

    /// Mean change in earlier-task accuracy between just-after-training and
    /// the end of the sequence. `None` for fewer than two tasks.
    pub fn bwt(&self) -> Option<f64> {
        let n = self.n_tasks();
        if n < 2 {
            return None;
        }
        let last = &self.rows[n - 1];
        let sum: f64 = (0..n - 1).map(|i| last[i] - self.rows[i][i]).sum();
        Some(sum / (n - 1) as f64)
    }
}

/// Fraction of test samples the classifier labels correctly.
pub fn test_accuracy(params: &ClassifierParams, testset: &[Sample]) -> f64 {
    assert!(!testset.is_empty(), "accuracy over an empty test set");
    let correct = testset.iter().filter(|s| predict(params, &s.state) == s.label).count();
    correct as f64 / testset.len() as f64
}
