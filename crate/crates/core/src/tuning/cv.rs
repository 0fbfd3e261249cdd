use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::sparse::{pmd_budget, Budget, PmdOptions};

/// Settings of the imputation cross-validation.
#[derive(Debug, Clone, Copy)]
pub struct CvOptions {
    /// Held-out sets per repeat.
    pub folds: usize,
    /// Fraction of cells removed in each fold.
    pub holdout_fraction: f64,
    pub repeats: usize,
    /// Fit-and-refill passes per fold.
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions { folds: 10, holdout_fraction: 0.10, repeats: 1, sweeps: 20, seed: 0 }
    }
}

/// Mean squared error of held-out cells imputed by a rank-1 sparse fit.
///
/// Each fold removes a random subset of cells, fills them with 0, and then
/// alternates a rank-1 fit under `budget` with refilling the removed cells
/// from the fit. The error is averaged over folds and repeats.
pub fn cv_error(z: &DenseMatrix, budget: Budget, opts: &CvOptions, pmd: &PmdOptions) -> Result<f64> {
    let cells = z.rows() * z.cols();
    let held = (opts.holdout_fraction * cells as f64).round() as usize;
    if opts.folds == 0 || opts.repeats == 0 || opts.sweeps == 0 {
        return Err(Error::invalid("folds, repeats and sweeps must be positive"));
    }
    if held == 0 || held >= cells {
        return Err(Error::invalid(format!(
            "holdout fraction {} leaves no usable split of {cells} cells",
            opts.holdout_fraction
        )));
    }
    let budget = budget.validated(z.rows(), z.cols())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut total = 0.0;
    for _ in 0..opts.repeats * opts.folds {
        let mask = sample(&mut rng, cells, held).into_vec();
        total += fold_error(z, budget, &mask, opts.sweeps, pmd)?;
    }
    Ok(total / (opts.repeats * opts.folds) as f64)
}

fn fold_error(z: &DenseMatrix, budget: Budget, mask: &[usize], sweeps: usize, pmd: &PmdOptions) -> Result<f64> {
    let cols = z.cols();
    let mut filled = z.as_slice().to_vec();
    for &k in mask {
        filled[k] = 0.0;
    }
    let mut init: Option<Vec<f64>> = None;
    let mut fit = vec![0.0; mask.len()];
    for _ in 0..sweeps {
        let x = DenseMatrix::new(z.rows(), cols, filled.clone())?;
        let f = match pmd_budget(&x, budget, pmd, init.as_deref(), None) {
            Ok(f) => f,
            // every observed cell is zero: the imputation stays at zero
            Err(Error::Degenerate(_)) => break,
            Err(e) => return Err(e),
        };
        for (slot, &k) in fit.iter_mut().zip(mask) {
            *slot = f.alpha * f.u[k / cols] * f.v[k % cols];
        }
        for (&value, &k) in fit.iter().zip(mask) {
            filled[k] = value;
        }
        init = Some(f.v);
    }
    let z = z.as_slice();
    Ok(mask.iter().zip(&fit).map(|(&k, f)| (z[k] - f).powi(2)).sum::<f64>() / mask.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn exact_rank_one_is_imputed() {
        // unit singular value and vectors, the scale of CA residual matrices
        let unit = |x: Vec<f64>| {
            let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            x.into_iter().map(|a| a / n).collect::<Vec<_>>()
        };
        let u = unit((0..8).map(|i| 1.0 + i as f64 * 0.3).collect());
        let v = unit((0..6).map(|j| (j as f64 - 2.5) * 0.7 + 0.1).collect());
        let mut z = DenseMatrix::zeros(8, 6);
        z.add_outer(1.0, &u, &v);
        let budget = Budget::inactive(8, 6);
        let e = cv_error(&z, budget, &CvOptions::default(), &PmdOptions::default()).unwrap();
        assert!(e <= 1e-6, "{e}");
    }

    #[test]
    fn same_seed_same_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = DenseMatrix::from_fn(9, 7, |_, _| rng.gen_range(-1.0..1.0));
        let b = Budget { sumabsu: Some(2.0), sumabsv: Some(1.8) };
        let o = CvOptions { seed: 42, ..Default::default() };
        let a = cv_error(&z, b, &o, &PmdOptions::default()).unwrap();
        let c = cv_error(&z, b, &o, &PmdOptions::default()).unwrap();
        assert_eq!(a.to_bits(), c.to_bits());
        let d = cv_error(&z, b, &CvOptions { seed: 43, ..o }, &PmdOptions::default()).unwrap();
        assert_ne!(a, d);
    }

    /// Rank-2 signal plus noise: a moderately sparse budget imputes better
    /// than the 1-sparse boundary.
    #[test]
    fn moderate_sparsity_beats_one_sparse() {
        let (n, p) = (20, 15);
        let mut moderate = 0.0;
        let mut boundary = 0.0;
        for rep in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + rep);
            let mut z = DenseMatrix::from_fn(n, p, |_, _| 0.02 * rng.gen_range(-1.0..1.0));
            for (scale, s) in [(3.0, 0u64), (1.5, 1)] {
                let mut r2 = ChaCha8Rng::seed_from_u64(1000 * rep + s);
                let u: Vec<f64> = (0..n).map(|_| r2.gen_range(-1.0..1.0)).collect();
                let v: Vec<f64> = (0..p).map(|j| if j < 8 { r2.gen_range(-1.0..1.0) } else { 0.0 }).collect();
                z.add_outer(scale / n as f64, &u, &v);
            }
            let o = CvOptions { seed: rep, ..Default::default() };
            let pmd = PmdOptions::default();
            let coupled = |s: f64| Budget { sumabsu: Some((n as f64).sqrt() * s), sumabsv: Some((p as f64).sqrt() * s) };
            // lower bound of the coupled range is 1/sqrt(15)
            boundary += cv_error(&z, coupled(1.0 / (p as f64).sqrt() + 1e-9), &o, &pmd).unwrap();
            moderate += cv_error(&z, coupled(0.7), &o, &pmd).unwrap();
        }
        assert!(moderate <= boundary, "{moderate} vs {boundary}");
    }
}
