use super::variance::projection_fit;
use crate::error::{Error, Result};
use crate::numerics::{full_svd, DenseMatrix};
use crate::sparse::{SparseFactor, Variant};

/// Model-selection criterion for the sparsity parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Index of sparsity, `fit_tau / fit_original * (#0 / pr)^2` (maximized).
    Is,
    /// Index of sparsity with the ratio inverted, `fit_original / fit_tau`.
    IsPrinted,
    /// Rank-1 BIC (minimized).
    Bic,
    /// Cross-validated imputation error (minimized).
    Cv,
}

impl Criterion {
    pub fn maximize(self) -> bool {
        matches!(self, Criterion::Is | Criterion::IsPrinted)
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Is => "is",
            Criterion::IsPrinted => "is-printed",
            Criterion::Bic => "bic",
            Criterion::Cv => "cv",
        }
    }
}

/// Orientation of the fit ratio in the index of sparsity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsOrientation {
    /// `fit_tau / fit_original`
    #[default]
    TradeOff,
    /// `fit_original / fit_tau`
    Printed,
}

/// `(fit ratio) * (zeros / total)^2`.
pub fn is_index(fit_tau: f64, fit_original: f64, zeros: usize, total: usize, orientation: IsOrientation) -> f64 {
    if zeros == 0 || total == 0 {
        return 0.0;
    }
    let share = zeros as f64 / total as f64;
    let ratio = match orientation {
        IsOrientation::TradeOff => fit_tau / fit_original,
        IsOrientation::Printed => fit_original / fit_tau,
    };
    ratio * share * share
}

/// Index of sparsity of `factors` on `z`.
///
/// The fit is the projection fit of the stacked column weights; the
/// reference fit uses as many leading right singular vectors. Zeros are
/// counted over the penalized weight vectors only.
pub fn is_criterion(z: &DenseMatrix, factors: &[SparseFactor], variant: Variant, orientation: IsOrientation) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::invalid("index of sparsity needs at least one factor"));
    }
    let r = factors.len();
    let v = DenseMatrix::from_columns(&factors.iter().map(|f| f.v.clone()).collect::<Vec<_>>());
    let fit_tau = projection_fit(z, &v)?.fraction;
    let fit_original = leading_fit(z, r)?;
    let (zeros, total) = zero_count(factors, variant, z.rows(), z.cols());
    Ok(is_index(fit_tau, fit_original, zeros, total, orientation))
}

/// Share of `||Z||^2` carried by the leading `r` singular values.
pub fn leading_fit(z: &DenseMatrix, r: usize) -> Result<f64> {
    let svd = full_svd(z)?;
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return Err(Error::Degenerate("matrix has no variance to explain".into()));
    }
    Ok(svd.singular_values.iter().take(r).map(|s| s * s).sum::<f64>() / total)
}

fn zero_count(factors: &[SparseFactor], variant: Variant, n_rows: usize, n_cols: usize) -> (usize, usize) {
    let per = |f: &SparseFactor| match variant {
        Variant::DoublySparse => (n_rows - f.nnz_u) + (n_cols - f.nnz_v),
        Variant::ColumnSparse => n_cols - f.nnz_v,
    };
    let total = match variant {
        Variant::DoublySparse => n_rows + n_cols,
        Variant::ColumnSparse => n_cols,
    };
    (factors.iter().map(per).sum(), total * factors.len())
}

/// Nonzero weights on the penalized sides.
pub fn degrees_of_freedom(f: &SparseFactor, variant: Variant) -> usize {
    match variant {
        Variant::DoublySparse => f.nnz_u + f.nnz_v,
        Variant::ColumnSparse => f.nnz_v,
    }
}

/// Error variance from the unconstrained rank-1 residual,
/// `||Z - s1 u1 v1'||^2 / (np - df_full)`.
pub fn sigma2_hat(z: &DenseMatrix, variant: Variant) -> Result<f64> {
    let (n, p) = z.shape();
    let df_full = match variant {
        Variant::DoublySparse => n + p,
        Variant::ColumnSparse => p,
    };
    if n * p <= df_full {
        return Err(Error::invalid(format!("a {n}x{p} matrix leaves no residual degrees of freedom")));
    }
    let svd = full_svd(z)?;
    let rss: f64 = svd.singular_values.iter().skip(1).map(|s| s * s).sum();
    let s2 = rss / (n * p - df_full) as f64;
    if !(s2 > 0.0) {
        return Err(Error::Degenerate("rank-one matrix: residual variance is zero".into()));
    }
    Ok(s2)
}

/// `||Z - alpha u v'||^2 / (np s2) + ln(np)/(np) df`, with `alpha = u'Zv`.
pub fn bic_criterion(z: &DenseMatrix, f: &SparseFactor, sigma2_hat: f64, variant: Variant) -> Result<f64> {
    if !(sigma2_hat > 0.0) {
        return Err(Error::invalid(format!("error variance must be positive, got {sigma2_hat}")));
    }
    let np = (z.rows() * z.cols()) as f64;
    Ok(rank1_residual(z, &f.u, &f.v) / (np * sigma2_hat) + np.ln() / np * degrees_of_freedom(f, variant) as f64)
}

/// `||Z - alpha u v'||_F^2` for unit `u`, `v`, which equals `||Z||^2 - alpha^2`.
fn rank1_residual(z: &DenseMatrix, u: &[f64], v: &[f64]) -> f64 {
    let alpha = z.bilinear(u, v);
    let mut fitted = z.clone();
    fitted.add_outer(-alpha, u, v);
    fitted.frobenius_norm_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{pmd_rank1, SparsityConstraint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn dense(z: &DenseMatrix) -> SparseFactor {
        let (i, j) = z.shape();
        pmd_rank1(z, &SparsityConstraint::Absolute { sumabsu: (i as f64).sqrt(), sumabsv: (j as f64).sqrt() }).unwrap()
    }

    #[test]
    fn no_zeros_gives_zero_index() {
        let z = random(6, 5, 1);
        let f = dense(&z);
        assert_eq!(is_criterion(&z, std::slice::from_ref(&f), Variant::DoublySparse, IsOrientation::TradeOff).unwrap(), 0.0);
        assert_eq!(is_criterion(&z, &[f], Variant::DoublySparse, IsOrientation::Printed).unwrap(), 0.0);
    }

    #[test]
    fn index_ignores_sign_flips() {
        let z = random(8, 7, 2);
        let f = pmd_rank1(&z, &SparsityConstraint::Coupled { sumabs: 0.6 }).unwrap();
        let mut g = f.clone();
        g.u.iter_mut().for_each(|x| *x = -*x);
        g.v.iter_mut().for_each(|x| *x = -*x);
        let a = is_criterion(&z, &[f], Variant::DoublySparse, IsOrientation::TradeOff).unwrap();
        let b = is_criterion(&z, &[g], Variant::DoublySparse, IsOrientation::TradeOff).unwrap();
        assert!(a > 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn index_by_hand() {
        // 3 of 10 zero, fit ratio 0.8 / 0.9
        let v = is_index(0.8, 0.9, 3, 10, IsOrientation::TradeOff);
        assert!((v - 0.8 / 0.9 * 0.09).abs() < 1e-15);
        let v = is_index(0.8, 0.9, 3, 10, IsOrientation::Printed);
        assert!((v - 0.9 / 0.8 * 0.09).abs() < 1e-15);
    }

    #[test]
    fn unconstrained_residual_term() {
        let z = random(7, 6, 3);
        let svd = full_svd(&z).unwrap();
        let f = dense(&z);
        let s2 = 0.37;
        let np = 42.0;
        let norm2 = z.frobenius_norm_sq();
        let expected_res = (1.0 - svd.singular_values[0].powi(2) / norm2) * norm2 / (np * s2);
        let bic = bic_criterion(&z, &f, s2, Variant::DoublySparse).unwrap();
        let penalty = np.ln() / np * 13.0;
        assert!((bic - penalty - expected_res).abs() < 1e-10);
    }

    #[test]
    fn rank_one_residual_vanishes() {
        let u = [0.6, 0.8, 0.0];
        let v = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let mut z = DenseMatrix::zeros(3, 2);
        z.add_outer(2.5, &u, &v);
        let f = dense(&z);
        let bic = bic_criterion(&z, &f, 1.0, Variant::DoublySparse).unwrap();
        let np = 6.0f64;
        assert!((bic - np.ln() / np * (f.nnz_u + f.nnz_v) as f64).abs() < 1e-12);
        assert!(matches!(sigma2_hat(&z, Variant::ColumnSparse), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sigma2_uses_trailing_spectrum() {
        let z = random(6, 5, 4);
        let svd = full_svd(&z).unwrap();
        let rss: f64 = svd.singular_values[1..].iter().map(|s| s * s).sum();
        assert!((sigma2_hat(&z, Variant::DoublySparse).unwrap() - rss / 19.0).abs() < 1e-14);
        assert!((sigma2_hat(&z, Variant::ColumnSparse).unwrap() - rss / 25.0).abs() < 1e-14);
    }
}
