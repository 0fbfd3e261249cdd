use super::grid::GridParam;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::sparse::{leading_right_vector, pmd_budget, Budget, PmdOptions, Variant};

/// Fitted weights along a parameter grid.
#[derive(Debug, Clone)]
pub struct WeightPath {
    /// Ascending parameter values.
    pub params: Vec<f64>,
    /// Row weights per parameter value.
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub zero_share_u: Vec<f64>,
    pub zero_share_v: Vec<f64>,
}

impl WeightPath {
    /// Nonzero counts `(nnz_u, nnz_v)` per parameter value.
    pub fn nonzeros(&self) -> Vec<(usize, usize)> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| (u.iter().filter(|&&x| x != 0.0).count(), v.iter().filter(|&&x| x != 0.0).count()))
            .collect()
    }
}

/// Rank-1 weights of `z` for every grid value.
pub fn weight_paths(z: &DenseMatrix, grid: &[f64], param: GridParam, variant: Variant, pmd: &PmdOptions) -> Result<WeightPath> {
    if grid.is_empty() {
        return Err(Error::invalid("parameter grid is empty"));
    }
    let mut params = grid.to_vec();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let (i_n, j_n) = z.shape();
    let init = leading_right_vector(z)?;
    let mut path = WeightPath { params: Vec::new(), u: Vec::new(), v: Vec::new(), zero_share_u: Vec::new(), zero_share_v: Vec::new() };
    for &s in &params {
        let sv = match param {
            GridParam::Coupled => (j_n as f64).sqrt() * s,
            GridParam::ColumnBudget => s,
        };
        let su = match (param, variant) {
            (GridParam::Coupled, Variant::DoublySparse) => Some((i_n as f64).sqrt() * s),
            _ => None,
        };
        let f = pmd_budget(z, Budget { sumabsu: su, sumabsv: Some(sv) }, pmd, Some(&init), None)?;
        path.zero_share_u.push((i_n - f.nnz_u) as f64 / i_n as f64);
        path.zero_share_v.push((j_n - f.nnz_v) as f64 / j_n as f64);
        path.u.push(f.u);
        path.v.push(f.v);
    }
    path.params = params;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{count_nonzero, full_svd, l1_project};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn top_of_path_is_the_svd() {
        let z = random(7, 6, 1);
        let p = weight_paths(&z, &[0.5, 1.0, 0.7], GridParam::Coupled, Variant::DoublySparse, &PmdOptions::default()).unwrap();
        assert_eq!(p.params, vec![0.5, 0.7, 1.0]);
        let svd = full_svd(&z).unwrap();
        let (u, v) = (&p.u[2], &p.v[2]);
        let s: f64 = v.iter().zip(svd.right(0)).map(|(a, b)| a * b).sum::<f64>().signum();
        for (a, b) in u.iter().zip(svd.left(0)) {
            assert!((a - s * b).abs() < 1e-8);
        }
        assert_eq!(p.zero_share_u[2], 0.0);
        assert!(p.u.iter().all(|w| w.len() == 7) && p.v.iter().all(|w| w.len() == 6));
    }

    #[test]
    fn singleton_path() {
        let z = random(4, 9, 2);
        let p = weight_paths(&z, &[2.0], GridParam::ColumnBudget, Variant::ColumnSparse, &PmdOptions::default()).unwrap();
        assert_eq!(p.params.len(), 1);
        assert_eq!(p.nonzeros()[0].0, 4);
    }

    /// One thresholding step of a fixed `Z'u`: nonzeros only shrink as the
    /// budget decreases.
    #[test]
    fn single_step_nonzeros_shrink_with_budget() {
        let z = random(8, 20, 3);
        let u = full_svd(&z).unwrap().left(0);
        let x = z.tr_mul_vec(&u);
        let grid = crate::tuning::default_column_grid(20);
        let counts: Vec<usize> = grid.iter().map(|&c| count_nonzero(&l1_project(&x, c).unwrap().vector)).collect();
        for w in counts.windows(2) {
            assert!(w[0] <= w[1], "{counts:?}");
        }
    }
}
