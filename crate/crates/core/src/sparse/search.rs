use super::constraint::Budget;
use super::pmd::{leading_right_vector, pmd_budget, PmdOptions};
use crate::error::{Axis, Error, Result};
use crate::numerics::DenseMatrix;

/// Step of the budget grid scanned by [`nnz_target_search`].
pub const NNZ_GRID_STEP: f64 = 0.2;

/// Result of a nonzero-count search.
#[derive(Debug, Clone)]
pub struct NnzSearch {
    /// Selected budget for the searched axis.
    pub sumabs: f64,
    /// Nonzero count obtained with that budget.
    pub achieved: usize,
    /// False when no grid value reaches the target; `sumabs` is then the
    /// value whose count is closest to it.
    pub reached: bool,
    /// Every evaluated `(budget, nonzeros)` pair, in grid order.
    pub evaluated: Vec<(f64, usize)>,
}

/// `1, 1.2, 1.4, ...` up to `sqrt(len)`, always ending at `sqrt(len)`.
pub fn budget_grid(len: usize, step: f64) -> Vec<f64> {
    let top = (len as f64).sqrt();
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let x = 1.0 + step * k as f64;
        if x > top + 1e-12 {
            break;
        }
        grid.push((x * 1e9).round() / 1e9);
        k += 1;
    }
    if grid.last().is_none_or(|&last| top - last > 1e-9) {
        grid.push(top);
    }
    grid
}

/// Smallest grid budget on `axis` whose factor has at least `target`
/// nonzero weights on that axis.
///
/// `other` is the budget of the opposite axis (`None` = unpenalized). `z` is
/// the matrix at the current deflation step.
pub fn nnz_target_search(
    z: &DenseMatrix,
    target: usize,
    axis: Axis,
    other: Option<f64>,
    opts: &PmdOptions,
) -> Result<NnzSearch> {
    let len = match axis {
        Axis::Rows => z.rows(),
        Axis::Cols => z.cols(),
    };
    if target == 0 || target > len {
        return Err(Error::invalid(format!("nonzero target {target} outside 1..={len}")));
    }
    let init = leading_right_vector(z)?;
    let mut evaluated = Vec::new();
    for s in budget_grid(len, NNZ_GRID_STEP) {
        let budget = match axis {
            Axis::Rows => Budget { sumabsu: Some(s), sumabsv: other },
            Axis::Cols => Budget { sumabsu: other, sumabsv: Some(s) },
        };
        let f = pmd_budget(z, budget, opts, Some(&init), None)?;
        let nnz = match axis {
            Axis::Rows => f.nnz_u,
            Axis::Cols => f.nnz_v,
        };
        evaluated.push((s, nnz));
        if nnz >= target {
            return Ok(NnzSearch { sumabs: s, achieved: nnz, reached: true, evaluated });
        }
    }
    let &(sumabs, achieved) = evaluated
        .iter()
        .min_by_key(|(_, n)| target.abs_diff(*n))
        .expect("grid is never empty");
    Ok(NnzSearch { sumabs, achieved, reached: false, evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_shape() {
        let g = budget_grid(4, 0.2);
        assert_eq!(g, vec![1.0, 1.2, 1.4, 1.6, 1.8, 2.0]);
        let g = budget_grid(3, 0.2);
        assert_eq!(g.len(), 5);
        assert!((g[4] - 3.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(budget_grid(1, 0.2), vec![1.0]);
    }

    #[test]
    fn target_one_is_the_unit_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = DenseMatrix::from_fn(8, 30, |_, _| rng.gen_range(-1.0..1.0));
        let s = nnz_target_search(&z, 1, Axis::Cols, None, &PmdOptions::default()).unwrap();
        assert_eq!(s.sumabs, 1.0);
        assert!(s.reached);
        assert!(s.achieved >= 1);
    }

    #[test]
    fn reaches_requested_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let z = DenseMatrix::from_fn(10, 60, |_, _| rng.gen_range(-1.0..1.0));
        let s = nnz_target_search(&z, 20, Axis::Cols, None, &PmdOptions::default()).unwrap();
        assert!(s.reached && s.achieved >= 20);
        // previous grid value fell short
        let n = s.evaluated.len();
        if n > 1 {
            assert!(s.evaluated[n - 2].1 < 20);
        }
        assert!(nnz_target_search(&z, 61, Axis::Cols, None, &PmdOptions::default()).is_err());
    }
}
