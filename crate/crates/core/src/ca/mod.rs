//! Standard correspondence analysis.

mod table;

pub use table::ContingencyTable;

use crate::error::{Error, Result};
use crate::numerics::{full_svd, DenseMatrix};

/// Correspondence matrix `P = N / n` with its row and column masses.
#[derive(Debug, Clone)]
pub struct Correspondence {
    pub p: DenseMatrix,
    pub r: Vec<f64>,
    pub c: Vec<f64>,
}

/// `P = N/n`, `r = P 1`, `c = P' 1`.
pub fn correspondence_matrix(t: &ContingencyTable) -> Result<Correspondence> {
    let n = t.total();
    let counts = t.counts();
    let p = DenseMatrix::from_fn(counts.rows(), counts.cols(), |i, j| counts[(i, j)] / n);
    let r = p.row_sums();
    let c = p.col_sums();
    // The table constructor already guarantees positive margins.
    if let Some(i) = r.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::SingularMargin { axis: crate::Axis::Rows, label: t.row_labels()[i].clone() });
    }
    if let Some(j) = c.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::SingularMargin { axis: crate::Axis::Cols, label: t.col_labels()[j].clone() });
    }
    Ok(Correspondence { p, r, c })
}

/// `Z_ij = (p_ij - r_i c_j) / sqrt(r_i c_j)`.
pub fn standardized_residuals(p: &DenseMatrix, r: &[f64], c: &[f64]) -> DenseMatrix {
    DenseMatrix::from_fn(p.rows(), p.cols(), |i, j| {
        let e = r[i] * c[j];
        (p[(i, j)] - e) / e.sqrt()
    })
}

/// Pearson's phi-square, the total inertia of the table.
pub fn total_inertia(t: &ContingencyTable) -> f64 {
    let n = t.total();
    let counts = t.counts();
    let r: Vec<f64> = counts.row_sums().iter().map(|x| x / n).collect();
    let c: Vec<f64> = counts.col_sums().iter().map(|x| x / n).collect();
    let mut phi2 = 0.0;
    for i in 0..counts.rows() {
        for j in 0..counts.cols() {
            let e = r[i] * c[j];
            let d = counts[(i, j)] / n - e;
            phi2 += d * d / e;
        }
    }
    phi2
}

/// A fitted standard CA.
#[derive(Debug, Clone)]
pub struct CaModel {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub correspondence: Correspondence,
    /// Standardized residuals.
    pub z: DenseMatrix,
    /// All `min(I-1, J-1)` nontrivial eigenvalues, nonincreasing.
    pub eigenvalues: Vec<f64>,
    /// Left singular vectors of `Z` for the retained dimensions (`I x k`).
    pub u: DenseMatrix,
    /// Right singular vectors of `Z` for the retained dimensions (`J x k`).
    pub v: DenseMatrix,
    /// Row principal coordinates `D_r^{-1/2} U D_alpha` (`I x k`).
    pub a: DenseMatrix,
    /// Column principal coordinates `D_c^{-1/2} V D_alpha` (`J x k`).
    pub b: DenseMatrix,
    pub total_inertia: f64,
}

impl CaModel {
    pub fn dims(&self) -> usize {
        self.a.cols()
    }

    /// Eigenvalues as fractions of the total inertia.
    pub fn inertia_shares(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l / self.total_inertia).collect()
    }
}

/// Standard CA keeping the leading `k` dimensions.
pub fn fit_ca(t: &ContingencyTable, k: usize) -> Result<CaModel> {
    let max = t.max_dims();
    if k == 0 || k > max {
        return Err(Error::invalid(format!("number of dimensions must be in 1..={max}, got {k}")));
    }
    let corr = correspondence_matrix(t)?;
    let z = standardized_residuals(&corr.p, &corr.r, &corr.c);
    let svd = full_svd(&z)?;
    let eigenvalues: Vec<f64> = svd.singular_values.iter().take(max).map(|s| s * s).collect();

    let (i_n, j_n) = z.shape();
    let u = DenseMatrix::from_fn(i_n, k, |i, d| svd.u[(i, d)]);
    let v = DenseMatrix::from_fn(j_n, k, |j, d| svd.v[(j, d)]);
    let a = DenseMatrix::from_fn(i_n, k, |i, d| u[(i, d)] * svd.singular_values[d] / corr.r[i].sqrt());
    let b = DenseMatrix::from_fn(j_n, k, |j, d| v[(j, d)] * svd.singular_values[d] / corr.c[j].sqrt());
    let total_inertia = z.frobenius_norm_sq();

    Ok(CaModel {
        row_labels: t.row_labels().to_vec(),
        col_labels: t.col_labels().to_vec(),
        correspondence: corr,
        z,
        eigenvalues,
        u,
        v,
        a,
        b,
        total_inertia,
    })
}

/// Share of each category in the inertia of each axis.
#[derive(Debug, Clone)]
pub struct ContributionTable {
    /// `I x k`, each column sums to one (or is all zero when degenerate).
    pub rows: DenseMatrix,
    /// `J x k`
    pub cols: DenseMatrix,
    /// Axes with zero inertia; their contribution columns are all zero.
    pub degenerate: Vec<bool>,
}

/// `r_i a_ik^2 / lambda_k` and `c_j b_jk^2 / lambda_k`.
pub fn contributions(m: &CaModel) -> ContributionTable {
    let lambdas = &m.eigenvalues[..m.dims()];
    contributions_from_coordinates(&m.a, &m.b, &m.correspondence.r, &m.correspondence.c, lambdas)
}

pub(crate) fn contributions_from_coordinates(
    a: &DenseMatrix,
    b: &DenseMatrix,
    r: &[f64],
    c: &[f64],
    lambdas: &[f64],
) -> ContributionTable {
    let scale = lambdas.iter().cloned().fold(0.0, f64::max);
    let degenerate: Vec<bool> = lambdas.iter().map(|&l| !(l > scale * 1e-14) || l == 0.0).collect();
    let build = |coords: &DenseMatrix, mass: &[f64]| {
        DenseMatrix::from_fn(coords.rows(), coords.cols(), |i, k| {
            if degenerate[k] {
                0.0
            } else {
                mass[i] * coords[(i, k)].powi(2) / lambdas[k]
            }
        })
    };
    ContributionTable { rows: build(a, r), cols: build(b, c), degenerate }
}
