use crate::error::{Axis, Error, Result};

/// Slack tolerated on the budget bounds.
const SLACK: f64 = 1e-9;

/// How the L1 budgets of one dimension are specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparsityConstraint {
    /// Separate budgets, `1 <= sumabsu <= sqrt(I)` and `1 <= sumabsv <= sqrt(J)`.
    Absolute { sumabsu: f64, sumabsv: f64 },
    /// One parameter in `(max(1/sqrt(I), 1/sqrt(J)), 1]`, mapped to
    /// `sumabsu = sqrt(I) sumabs` and `sumabsv = sqrt(J) sumabs`.
    Coupled { sumabs: f64 },
    /// Column budget only; row weights are plainly normalized.
    UnpenalizedRows { sumabsv: f64 },
    /// Smallest budget on `axis` (over a 0.2-step grid) reaching `count`
    /// nonzero weights; the other axis is left unpenalized.
    NonzeroTarget { count: usize, axis: Axis },
}

/// Resolved L1 budgets; `None` means no penalty on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub sumabsu: Option<f64>,
    pub sumabsv: Option<f64>,
}

impl Budget {
    pub const UNPENALIZED: Budget = Budget { sumabsu: None, sumabsv: None };

    /// Both budgets at their maximum, i.e. an ordinary rank-1 SVD.
    pub fn inactive(n_rows: usize, n_cols: usize) -> Budget {
        Budget { sumabsu: Some((n_rows as f64).sqrt()), sumabsv: Some((n_cols as f64).sqrt()) }
    }

    /// Checks both budgets against `[1, sqrt(len)]` and clamps away float slack.
    pub fn validated(self, n_rows: usize, n_cols: usize) -> Result<Budget> {
        Ok(Budget {
            sumabsu: check_range(self.sumabsu, n_rows, "sumabsu")?,
            sumabsv: check_range(self.sumabsv, n_cols, "sumabsv")?,
        })
    }

    /// Number of penalized sides.
    pub fn penalized_sides(&self) -> usize {
        self.sumabsu.is_some() as usize + self.sumabsv.is_some() as usize
    }
}

fn check_range(value: Option<f64>, len: usize, name: &str) -> Result<Option<f64>> {
    let Some(c) = value else { return Ok(None) };
    let upper = (len as f64).sqrt();
    if !(c >= 1.0 - SLACK && c <= upper + SLACK) {
        return Err(Error::invalid(format!("{name} = {c} outside [1, {upper:.6}]")));
    }
    Ok(Some(c.clamp(1.0, upper)))
}

impl SparsityConstraint {
    /// Budgets for an `n_rows x n_cols` matrix. `NonzeroTarget` needs a search
    /// and cannot be resolved here.
    pub fn budget(&self, n_rows: usize, n_cols: usize) -> Result<Budget> {
        match *self {
            SparsityConstraint::Absolute { sumabsu, sumabsv } => {
                Budget { sumabsu: Some(sumabsu), sumabsv: Some(sumabsv) }.validated(n_rows, n_cols)
            }
            SparsityConstraint::Coupled { sumabs } => {
                let (ri, rj) = ((n_rows as f64).sqrt(), (n_cols as f64).sqrt());
                let lower = (1.0 / ri).max(1.0 / rj);
                if !(sumabs > lower - SLACK && sumabs <= 1.0 + SLACK) {
                    return Err(Error::invalid(format!("sumabs = {sumabs} outside ({lower:.6}, 1]")));
                }
                Budget { sumabsu: Some(ri * sumabs), sumabsv: Some(rj * sumabs) }.validated(n_rows, n_cols)
            }
            SparsityConstraint::UnpenalizedRows { sumabsv } => {
                Budget { sumabsu: None, sumabsv: Some(sumabsv) }.validated(n_rows, n_cols)
            }
            SparsityConstraint::NonzeroTarget { count, axis } => {
                let len = match axis {
                    Axis::Rows => n_rows,
                    Axis::Cols => n_cols,
                };
                if count == 0 || count > len {
                    return Err(Error::invalid(format!("nonzero target {count} outside 1..={len}")));
                }
                Err(Error::invalid("nonzero targets are resolved by a grid search"))
            }
        }
    }

    pub fn penalizes_rows(&self) -> bool {
        matches!(
            self,
            SparsityConstraint::Absolute { .. } | SparsityConstraint::NonzeroTarget { axis: Axis::Rows, .. }
        )
    }
}
