use std::collections::HashSet;

use crate::error::{Axis, Error, Result};
use crate::numerics::DenseMatrix;

/// Nonnegative two-way table with row and column labels.
///
/// Invariants: positive grand total, no all-zero row or column, labels unique
/// within each axis. Counts may be fractional.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    counts: DenseMatrix,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl ContingencyTable {
    pub fn new(counts: DenseMatrix, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        validate_shape_and_values(&counts, &row_labels, &col_labels)?;
        if let Some(i) = counts.row_sums().iter().position(|&s| s == 0.0) {
            return Err(Error::SingularMargin { axis: Axis::Rows, label: row_labels[i].clone() });
        }
        if let Some(j) = counts.col_sums().iter().position(|&s| s == 0.0) {
            return Err(Error::SingularMargin { axis: Axis::Cols, label: col_labels[j].clone() });
        }
        Ok(ContingencyTable { counts, row_labels, col_labels })
    }

    /// Like [`ContingencyTable::new`], but removes all-zero rows and columns
    /// (together with their labels) instead of rejecting them.
    pub fn new_drop_empty(counts: DenseMatrix, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        validate_shape_and_values(&counts, &row_labels, &col_labels)?;
        let keep_rows: Vec<usize> = (0..counts.rows()).filter(|&i| counts.row(i).iter().any(|&x| x > 0.0)).collect();
        let kept = counts.select_rows(&keep_rows);
        let keep_cols: Vec<usize> = kept.col_sums().iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(j, _)| j).collect();
        if keep_rows.is_empty() || keep_cols.is_empty() {
            return Err(Error::invalid("table is empty after dropping zero rows and columns"));
        }
        let counts = kept.select_columns(&keep_cols);
        let row_labels = keep_rows.iter().map(|&i| row_labels[i].clone()).collect();
        let col_labels = keep_cols.iter().map(|&j| col_labels[j].clone()).collect();
        ContingencyTable::new(counts, row_labels, col_labels)
    }

    /// Convenience constructor with generated labels `r1..`, `c1..`.
    pub fn from_counts(counts: DenseMatrix) -> Result<Self> {
        let rows = (1..=counts.rows()).map(|i| format!("r{i}")).collect();
        let cols = (1..=counts.cols()).map(|j| format!("c{j}")).collect();
        ContingencyTable::new(counts, rows, cols)
    }

    pub fn counts(&self) -> &DenseMatrix {
        &self.counts
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn n_rows(&self) -> usize {
        self.counts.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.counts.cols()
    }

    /// Grand total `n`.
    pub fn total(&self) -> f64 {
        self.counts.as_slice().iter().sum()
    }

    /// Largest number of nontrivial CA dimensions, `min(I-1, J-1)`.
    pub fn max_dims(&self) -> usize {
        (self.n_rows().min(self.n_cols())).saturating_sub(1)
    }
}

fn validate_shape_and_values(counts: &DenseMatrix, row_labels: &[String], col_labels: &[String]) -> Result<()> {
    if row_labels.len() != counts.rows() || col_labels.len() != counts.cols() {
        return Err(Error::invalid(format!(
            "{} row and {} column labels for a {}x{} table",
            row_labels.len(),
            col_labels.len(),
            counts.rows(),
            counts.cols()
        )));
    }
    for (axis, labels) in [(Axis::Rows, row_labels), (Axis::Cols, col_labels)] {
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::invalid(format!("duplicate {axis} label '{l}'")));
            }
        }
    }
    if let Some(pos) = counts.as_slice().iter().position(|&x| x < 0.0) {
        let (i, j) = (pos / counts.cols(), pos % counts.cols());
        return Err(Error::invalid(format!(
            "negative count at row '{}', column '{}'",
            row_labels[i], col_labels[j]
        )));
    }
    if !(counts.as_slice().iter().sum::<f64>() > 0.0) {
        return Err(Error::invalid("table total must be positive"));
    }
    Ok(())
}
