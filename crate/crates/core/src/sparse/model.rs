use super::constraint::SparsityConstraint;
use super::pmd::{deflate, deflation_residual, pmd_budget, resolve_budget, PmdOptions, SparseFactor};
use super::search::NnzSearch;
use crate::ca::{correspondence_matrix, standardized_residuals, ContingencyTable, Correspondence};
use crate::error::{Axis, Error, Result};
use crate::numerics::DenseMatrix;
use crate::tuning::projection_fit;

/// Which weights are penalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    DoublySparse,
    /// Column weights only; row weights are plainly normalized.
    ColumnSparse,
}

/// Column display for the column-sparse variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnScale {
    /// `b = D_c^{-1} P' a`, less spread than the rows.
    Barycentric,
    /// Barycentric direction rescaled to `b' D_c b = lambda`.
    #[default]
    Rescaled,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SparseCaOptions {
    pub pmd: PmdOptions,
    pub col_scale: ColumnScale,
}

/// Pairwise inner products between dimensions (`k x k` each).
#[derive(Debug, Clone)]
pub struct GramReport {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    /// `<a_s, a_t>_{D_r}`
    pub a: DenseMatrix,
    /// `<b_s, b_t>_{D_c}`
    pub b: DenseMatrix,
}

impl GramReport {
    /// Largest off-diagonal magnitude of `m`.
    pub fn max_off_diagonal(m: &DenseMatrix) -> f64 {
        let mut out: f64 = 0.0;
        for s in 0..m.rows() {
            for t in 0..m.cols() {
                if s != t {
                    out = out.max(m[(s, t)].abs());
                }
            }
        }
        out
    }
}

/// Sparse CA fitted by successive rank-1 decompositions with projected deflation.
#[derive(Debug, Clone)]
pub struct SparseCaModel {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub variant: Variant,
    pub col_scale: ColumnScale,
    pub correspondence: Correspondence,
    /// Standardized residuals of the table (undeflated).
    pub z: DenseMatrix,
    /// Factors in extraction order. `alpha` and `lambda` are evaluated on `z`.
    pub factors: Vec<SparseFactor>,
    /// Row coordinates, `I x k`.
    pub a: DenseMatrix,
    /// Column coordinates, `J x k`.
    pub b: DenseMatrix,
    /// Pseudo-eigenvalues `(u'Zv)^2` on the undeflated matrix.
    pub lambdas: Vec<f64>,
    pub total_inertia: f64,
    /// Increment of the projection fit contributed by each dimension.
    pub explained: Vec<f64>,
    pub explained_cumulative: Vec<f64>,
    pub gram: GramReport,
    /// `(||Z'v||_inf, ||u'Z'||_inf)` after each deflation.
    pub deflation_residuals: Vec<(f64, f64)>,
    /// Grid search outcome for dimensions given as nonzero targets.
    pub searches: Vec<Option<NnzSearch>>,
    pub warnings: Vec<String>,
}

impl SparseCaModel {
    pub fn dims(&self) -> usize {
        self.factors.len()
    }

    /// Pseudo-eigenvalues as fractions of the total inertia.
    pub fn inertia_shares(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l / self.total_inertia).collect()
    }

    /// Row weights as columns, `I x k`.
    pub fn row_weights(&self) -> DenseMatrix {
        DenseMatrix::from_columns(&self.factors.iter().map(|f| f.u.clone()).collect::<Vec<_>>())
    }

    /// Column weights as columns, `J x k`.
    pub fn col_weights(&self) -> DenseMatrix {
        DenseMatrix::from_columns(&self.factors.iter().map(|f| f.v.clone()).collect::<Vec<_>>())
    }
}

/// Fits one dimension per entry of `constraints`.
pub fn fit_sparse_ca(
    t: &ContingencyTable,
    constraints: &[SparsityConstraint],
    variant: Variant,
    opts: &SparseCaOptions,
) -> Result<SparseCaModel> {
    let k = constraints.len();
    let max = t.max_dims();
    if k == 0 || k > max {
        return Err(Error::invalid(format!("number of dimensions must be in 1..={max}, got {k}")));
    }
    let corr = correspondence_matrix(t)?;
    let z = standardized_residuals(&corr.p, &corr.r, &corr.c);
    let (i_n, j_n) = z.shape();
    let constraints = match variant {
        Variant::DoublySparse => constraints.to_vec(),
        Variant::ColumnSparse => constraints
            .iter()
            .map(|c| column_sparse_constraint(c, i_n, j_n))
            .collect::<Result<Vec<_>>>()?,
    };

    let mut warnings = Vec::new();
    let mut factors = Vec::with_capacity(k);
    let mut searches = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut current = z.clone();
    for (d, c) in constraints.iter().enumerate() {
        let (budget, search) = resolve_budget(&current, c, &opts.pmd)?;
        if let Some(s) = &search {
            if !s.reached {
                warnings.push(format!(
                    "dimension {}: nonzero target not reached on the grid, closest is {} at budget {}",
                    d + 1,
                    s.achieved,
                    s.sumabs
                ));
            }
        }
        let mut f = pmd_budget(&current, budget, &opts.pmd, None, None)?;
        f.constraint = *c;
        if !f.converged {
            warnings.push(format!("dimension {}: no convergence after {} iterations", d + 1, f.iterations));
        }
        let next = deflate(&current, &f.u, &f.v)?;
        residuals.push(deflation_residual(&next, &f.u, &f.v));
        current = next;
        f.alpha = z.bilinear(&f.u, &f.v);
        f.lambda = f.alpha * f.alpha;
        factors.push(f);
        searches.push(search);
    }

    let lambdas: Vec<f64> = factors.iter().map(|f| f.lambda).collect();
    let mut a = DenseMatrix::zeros(i_n, k);
    let mut b = DenseMatrix::zeros(j_n, k);
    for (d, f) in factors.iter().enumerate() {
        let (ad, bd) = coordinates_from_weights(&corr, &f.u, &f.v, f.lambda)?;
        let bd = match variant {
            Variant::DoublySparse => bd,
            Variant::ColumnSparse => column_sparse_coordinates(&corr, &ad, f.lambda, opts.col_scale),
        };
        a.set_column(d, &ad);
        b.set_column(d, &bd);
    }

    let mut explained_cumulative = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    let mut prev = 0.0;
    for d in 1..=k {
        let v = DenseMatrix::from_columns(&factors[..d].iter().map(|f| f.v.clone()).collect::<Vec<_>>());
        let fit = projection_fit(&z, &v)?;
        if fit.rank_deficient {
            warnings.push(format!("dimension {d}: column weights are linearly dependent"));
        }
        // span only grows, guard against rounding
        let cum = fit.fraction.max(prev);
        explained.push(cum - prev);
        explained_cumulative.push(cum);
        prev = cum;
    }

    let gram = gram_report(&factors, &a, &b, &corr);
    Ok(SparseCaModel {
        row_labels: t.row_labels().to_vec(),
        col_labels: t.col_labels().to_vec(),
        variant,
        col_scale: opts.col_scale,
        total_inertia: z.frobenius_norm_sq(),
        correspondence: corr,
        z,
        factors,
        a,
        b,
        lambdas,
        explained,
        explained_cumulative,
        gram,
        deflation_residuals: residuals,
        searches,
        warnings,
    })
}

/// Row side unpenalized; coupled budgets keep their column part.
fn column_sparse_constraint(c: &SparsityConstraint, n_rows: usize, n_cols: usize) -> Result<SparsityConstraint> {
    match *c {
        SparsityConstraint::Coupled { sumabs } => {
            let sv = c.budget(n_rows, n_cols)?.sumabsv.expect("coupled budgets penalize columns");
            let _ = sumabs;
            Ok(SparsityConstraint::UnpenalizedRows { sumabsv: sv })
        }
        SparsityConstraint::Absolute { sumabsu, sumabsv } => {
            if sumabsu < (n_rows as f64).sqrt() - 1e-9 {
                return Err(Error::invalid("column-sparse fits cannot penalize the rows (sumabsu below sqrt(I))"));
            }
            Ok(SparsityConstraint::UnpenalizedRows { sumabsv })
        }
        SparsityConstraint::NonzeroTarget { axis: Axis::Rows, .. } => {
            Err(Error::invalid("column-sparse fits take nonzero targets on columns only"))
        }
        other => Ok(other),
    }
}

/// Coordinates of one dimension from its weights.
///
/// `a` is the row-profile image of the column weights, `D_r^{-1}(P - rc') D_c^{-1/2} v`,
/// and `b` the column-profile image of the row weights; each is scaled to
/// weighted variance `lambda`. With exact CA singular vectors this gives the
/// standard principal coordinates.
pub fn coordinates_from_weights(
    corr: &Correspondence,
    u: &[f64],
    v: &[f64],
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (p, r, c) = (&corr.p, &corr.r, &corr.c);
    if u.len() != r.len() || v.len() != c.len() {
        return Err(Error::invalid("weight lengths do not match the table"));
    }
    if !(lambda > 0.0) {
        return Err(Error::Degenerate(format!("pseudo-eigenvalue {lambda} is not positive")));
    }
    let vs: Vec<f64> = v.iter().zip(c).map(|(x, cj)| x / cj.sqrt()).collect();
    let us: Vec<f64> = u.iter().zip(r).map(|(x, ri)| x / ri.sqrt()).collect();
    let cv: f64 = c.iter().zip(&vs).map(|(a, b)| a * b).sum();
    let ru: f64 = r.iter().zip(&us).map(|(a, b)| a * b).sum();
    let pv = p.mul_vec(&vs);
    let pu = p.tr_mul_vec(&us);
    let a_raw: Vec<f64> = pv.iter().zip(r).map(|(x, ri)| x / ri - cv).collect();
    let b_raw: Vec<f64> = pu.iter().zip(c).map(|(x, cj)| x / cj - ru).collect();

    let a = scale_to_variance(&a_raw, r, lambda, &us)
        .ok_or_else(|| Error::Degenerate("row coordinates vanish for these column weights".into()))?;
    let b = scale_to_variance(&b_raw, c, lambda, &vs)
        .ok_or_else(|| Error::Degenerate("column coordinates vanish for these row weights".into()))?;
    Ok((a, b))
}

/// Column coordinates of the column-sparse variant from the row coordinates.
pub fn column_sparse_coordinates(corr: &Correspondence, a: &[f64], lambda: f64, scale: ColumnScale) -> Vec<f64> {
    let pa = corr.p.tr_mul_vec(a);
    let bary: Vec<f64> = pa.iter().zip(&corr.c).map(|(x, cj)| x / cj).collect();
    match scale {
        ColumnScale::Barycentric => bary,
        ColumnScale::Rescaled => {
            let var = weighted_sq(&bary, &corr.c);
            if var == 0.0 {
                return bary;
            }
            let s = (lambda / var).sqrt();
            bary.iter().map(|x| x * s).collect()
        }
    }
}

fn weighted_sq(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(a, m)| m * a * a).sum()
}

fn weighted_dot(x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(y).zip(w).map(|((a, b), m)| m * a * b).sum()
}

/// Scales `x` so that `x' D_w x = lambda`, oriented positively against `orient`.
fn scale_to_variance(x: &[f64], w: &[f64], lambda: f64, orient: &[f64]) -> Option<Vec<f64>> {
    let var = weighted_sq(x, w);
    if !(var > 0.0) {
        return None;
    }
    let mut s = (lambda / var).sqrt();
    let o: f64 = x.iter().zip(orient).map(|(a, b)| a * b).sum();
    if o < 0.0 {
        s = -s;
    }
    Some(x.iter().map(|v| v * s).collect())
}

fn gram_report(factors: &[SparseFactor], a: &DenseMatrix, b: &DenseMatrix, corr: &Correspondence) -> GramReport {
    let k = factors.len();
    let ones_r = vec![1.0; corr.r.len()];
    let ones_c = vec![1.0; corr.c.len()];
    let u = DenseMatrix::from_fn(k, k, |s, t| weighted_dot(&factors[s].u, &factors[t].u, &ones_r));
    let v = DenseMatrix::from_fn(k, k, |s, t| weighted_dot(&factors[s].v, &factors[t].v, &ones_c));
    let ga = DenseMatrix::from_fn(k, k, |s, t| weighted_dot(&a.column(s), &a.column(t), &corr.r));
    let gb = DenseMatrix::from_fn(k, k, |s, t| weighted_dot(&b.column(s), &b.column(t), &corr.c));
    GramReport { u, v, a: ga, b: gb }
}

/// Weights, contributions and zero flags of a sparse fit.
#[derive(Debug, Clone)]
pub struct SparseContributions {
    /// `u` per dimension, `I x k`; structural zeros are exactly `0.0`.
    pub row_weights: DenseMatrix,
    pub col_weights: DenseMatrix,
    /// Squared weights; each column sums to one.
    pub row_weight_contrib: DenseMatrix,
    pub col_weight_contrib: DenseMatrix,
    /// `r_i a_ik^2` over the weighted variance of the coordinate column.
    pub row_coord_contrib: DenseMatrix,
    pub col_coord_contrib: DenseMatrix,
    /// Rows whose weight is zero on every dimension.
    pub zero_rows: Vec<bool>,
    pub zero_cols: Vec<bool>,
}

pub fn sparse_contributions(m: &SparseCaModel) -> SparseContributions {
    let row_weights = m.row_weights();
    let col_weights = m.col_weights();
    let squared = |w: &DenseMatrix| DenseMatrix::from_fn(w.rows(), w.cols(), |i, k| w[(i, k)] * w[(i, k)]);
    let zero_flags =
        |w: &DenseMatrix| (0..w.rows()).map(|i| w.row(i).iter().all(|&x| x == 0.0)).collect::<Vec<_>>();
    SparseContributions {
        row_weight_contrib: squared(&row_weights),
        col_weight_contrib: squared(&col_weights),
        row_coord_contrib: coordinate_contributions(&m.a, &m.correspondence.r),
        col_coord_contrib: coordinate_contributions(&m.b, &m.correspondence.c),
        zero_rows: zero_flags(&row_weights),
        zero_cols: zero_flags(&col_weights),
        row_weights,
        col_weights,
    }
}

fn coordinate_contributions(coords: &DenseMatrix, mass: &[f64]) -> DenseMatrix {
    let denom: Vec<f64> = (0..coords.cols()).map(|k| weighted_sq(&coords.column(k), mass)).collect();
    DenseMatrix::from_fn(coords.rows(), coords.cols(), |i, k| {
        if denom[k] > 0.0 {
            mass[i] * coords[(i, k)].powi(2) / denom[k]
        } else {
            0.0
        }
    })
}
