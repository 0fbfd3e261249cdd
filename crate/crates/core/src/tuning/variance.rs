use crate::error::{Error, Result};
use crate::numerics::{full_svd, DenseMatrix};

/// Relative cutoff below which eigenvalues of `V'V` are treated as zero.
const PINV_RTOL: f64 = 1e-10;

/// Projection fit of a set of weight vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionFit {
    /// `Tr(X~'X~) / Tr(X'X)` with `X~ = X V (V'V)^+ V'`.
    pub fraction: f64,
    /// `V'V` was singular and a pseudo-inverse was used.
    pub rank_deficient: bool,
}

/// Share of `Tr(X'X)` captured by projecting the columns of `x` onto the span
/// of the weight columns `v` (`J x k`).
pub fn explained_variance(x: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    Ok(projection_fit(x, v)?.fraction)
}

pub fn projection_fit(x: &DenseMatrix, v: &DenseMatrix) -> Result<ProjectionFit> {
    if v.rows() != x.cols() {
        return Err(Error::invalid(format!(
            "weight matrix has {} rows, expected {}",
            v.rows(),
            x.cols()
        )));
    }
    let total = x.frobenius_norm_sq();
    if total == 0.0 {
        return Err(Error::Degenerate("explained variance of an all-zero matrix".into()));
    }
    let k = v.cols();
    let gram = v.transpose().matmul(v);
    // V'V is symmetric positive semidefinite, so its SVD is an eigendecomposition.
    let eig = full_svd(&gram)?;
    let smax = eig.singular_values[0];
    if smax == 0.0 {
        return Ok(ProjectionFit { fraction: 0.0, rank_deficient: true });
    }
    let mut rank_deficient = false;
    let mut pinv = DenseMatrix::zeros(k, k);
    for (d, &s) in eig.singular_values.iter().enumerate() {
        if s <= smax * PINV_RTOL {
            rank_deficient = true;
            continue;
        }
        let q = eig.u.column(d);
        pinv.add_outer(1.0 / s, &q, &q);
    }
    // Tr(X P X') with P = V (V'V)^+ V'  equals  Tr((V'V)^+ M'M), M = XV.
    let m = x.matmul(v);
    let mtm = m.transpose().matmul(&m);
    let mut captured = 0.0;
    for a in 0..k {
        for b in 0..k {
            captured += pinv[(a, b)] * mtm[(b, a)];
        }
    }
    Ok(ProjectionFit { fraction: (captured / total).clamp(0.0, 1.0), rank_deficient })
}
