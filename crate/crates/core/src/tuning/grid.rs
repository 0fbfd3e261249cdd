use rayon::prelude::*;

use super::criteria::{bic_criterion, is_index, leading_fit, sigma2_hat, Criterion, IsOrientation};
use super::cv::{cv_error, CvOptions};
use crate::error::{Error, Result};
use crate::numerics::{norm2, DenseMatrix};
use crate::sparse::{budget_grid, deflate, leading_right_vector, pmd_budget, Budget, PmdOptions, SparseFactor, Variant};

/// Environment variable capping the worker threads of a grid search.
pub const THREADS_ENV: &str = "SPARSE_CA_THREADS";

/// Meaning of the values of a one-dimensional grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridParam {
    /// `sumabs`, mapped to `sqrt(I) sumabs` and `sqrt(J) sumabs` (rows left
    /// unpenalized for the column-sparse variant).
    Coupled,
    /// `sumabsv` directly, rows unpenalized.
    ColumnBudget,
}

/// Parameter grid of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    OneD { values: Vec<f64>, param: GridParam },
    /// Full factorial `sumabsu x sumabsv`.
    TwoD { sumabsu: Vec<f64>, sumabsv: Vec<f64> },
}

#[derive(Debug, Clone, Copy)]
pub struct TuningSetup {
    pub variant: Variant,
    pub criterion: Criterion,
    pub cv: CvOptions,
    pub pmd: PmdOptions,
}

impl TuningSetup {
    pub fn new(variant: Variant, criterion: Criterion) -> Self {
        TuningSetup { variant, criterion, cv: CvOptions::default(), pmd: PmdOptions::default() }
    }
}

/// Evaluation of one grid cell.
#[derive(Debug, Clone)]
pub struct TuningCell {
    /// Grid coordinates: `(sumabs, None)` or `(sumabsu, Some(sumabsv))`.
    pub param: (f64, Option<f64>),
    pub budget: Budget,
    pub is: f64,
    pub is_printed: f64,
    /// NaN when the error variance is undefined (rank-one matrix).
    pub bic: f64,
    /// Only evaluated when tuning by cross-validation.
    pub cv: Option<f64>,
    pub nnz_u: usize,
    pub nnz_v: usize,
    /// Projection fit of the cell's column weights.
    pub fit: f64,
}

impl TuningCell {
    pub fn value(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Is => self.is,
            Criterion::IsPrinted => self.is_printed,
            Criterion::Bic => self.bic,
            Criterion::Cv => self.cv.unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TuningGrid {
    pub axis1: Vec<f64>,
    pub axis2: Option<Vec<f64>>,
    /// Row-major over `axis1 x axis2`.
    pub cells: Vec<TuningCell>,
}

#[derive(Debug, Clone)]
pub struct TuningResult {
    pub criterion: Criterion,
    pub optimum: (f64, Option<f64>),
    pub optimum_index: usize,
    pub optimum_value: f64,
    pub optimum_nnz: (usize, usize),
    /// Factor fitted at the optimum, on the searched matrix.
    pub optimum_factor: SparseFactor,
    /// A penalized side of the optimum keeps a single nonzero weight.
    pub too_sparse: bool,
    pub grid: TuningGrid,
}

/// Coupled grid `lower + 0.01, ..., 1.0` on two-decimal values strictly above
/// `max(1/sqrt(I), 1/sqrt(J))`.
pub fn default_coupled_grid(n_rows: usize, n_cols: usize) -> Vec<f64> {
    let lower = (1.0 / (n_rows as f64).sqrt()).max(1.0 / (n_cols as f64).sqrt());
    let start = (lower * 100.0 + 1e-9).floor() as i64 + 1;
    (start..=100).map(|k| k as f64 / 100.0).collect()
}

/// `1, 1.2, ...` up to `sqrt(J)`.
pub fn default_column_grid(n_cols: usize) -> Vec<f64> {
    budget_grid(n_cols, 0.2)
}

/// `1, 1 + step, ...` up to `sqrt(len)`.
pub fn default_absolute_grid(len: usize, step: f64) -> Vec<f64> {
    budget_grid(len, step)
}

/// One-dimensional search on `z`, the matrix at the current deflation step.
pub fn grid_search_1d(z: &DenseMatrix, values: &[f64], param: GridParam, setup: &TuningSetup) -> Result<TuningResult> {
    grid_search(z, &GridSpec::OneD { values: values.to_vec(), param }, setup)
}

/// Two-dimensional search over `sumabsu x sumabsv` on `z`.
pub fn grid_search_2d(z: &DenseMatrix, sumabsu: &[f64], sumabsv: &[f64], setup: &TuningSetup) -> Result<TuningResult> {
    grid_search(z, &GridSpec::TwoD { sumabsu: sumabsu.to_vec(), sumabsv: sumabsv.to_vec() }, setup)
}

pub fn grid_search(z: &DenseMatrix, spec: &GridSpec, setup: &TuningSetup) -> Result<TuningResult> {
    let (n_rows, n_cols) = z.shape();
    let (axis1, axis2, params) = layout(spec)?;
    if matches!(spec, GridSpec::TwoD { .. }) && setup.variant == Variant::ColumnSparse {
        return Err(Error::invalid("a two-dimensional grid needs the doubly sparse variant"));
    }
    let budgets: Vec<Budget> = params
        .iter()
        .map(|&p| budget_for(spec, p, setup.variant, n_rows, n_cols))
        .collect::<Result<_>>()?;

    let ctx = Context::new(z, setup)?;
    let cells: Vec<TuningCell> = with_pool(|| {
        params
            .par_iter()
            .zip(budgets.par_iter())
            .map(|(&p, &b)| ctx.evaluate(z, p, b, setup))
            .collect::<Result<Vec<_>>>()
    })?;

    let order = preference_order(&params);
    let maximize = setup.criterion.maximize();
    let mut best: Option<usize> = None;
    for idx in order {
        let v = cells[idx].value(setup.criterion);
        if v.is_nan() {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let bv = cells[b].value(setup.criterion);
                if maximize {
                    v > bv
                } else {
                    v < bv
                }
            }
        };
        if better {
            best = Some(idx);
        }
    }
    let best = best.ok_or_else(|| Error::Degenerate(format!("criterion {} undefined on every grid cell", setup.criterion.name())))?;
    let cell = &cells[best];
    let factor = pmd_budget(z, cell.budget, &setup.pmd, Some(&ctx.init), None)?;
    let too_sparse = (cell.budget.sumabsu.is_some() && cell.nnz_u == 1) || (cell.budget.sumabsv.is_some() && cell.nnz_v == 1);
    Ok(TuningResult {
        criterion: setup.criterion,
        optimum: cell.param,
        optimum_index: best,
        optimum_value: cell.value(setup.criterion),
        optimum_nnz: (cell.nnz_u, cell.nnz_v),
        optimum_factor: factor,
        too_sparse,
        grid: TuningGrid { axis1, axis2, cells },
    })
}

/// Tunes `k` dimensions in turn, deflating `z` with each optimum before
/// searching the next dimension.
pub fn tune_sequential(z: &DenseMatrix, k: usize, spec: &GridSpec, setup: &TuningSetup) -> Result<Vec<TuningResult>> {
    let mut current = z.clone();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let r = grid_search(&current, spec, setup)?;
        current = deflate(&current, &r.optimum_factor.u, &r.optimum_factor.v)?;
        out.push(r);
    }
    Ok(out)
}

/// Per-matrix quantities shared by all cells.
struct Context {
    init: Vec<f64>,
    total: f64,
    fit_original: f64,
    sigma2: Option<f64>,
}

impl Context {
    fn new(z: &DenseMatrix, setup: &TuningSetup) -> Result<Context> {
        let init = leading_right_vector(z)?;
        let sigma2 = match sigma2_hat(z, setup.variant) {
            Ok(s) => Some(s),
            Err(e) if setup.criterion == Criterion::Bic => return Err(e),
            Err(_) => None,
        };
        Ok(Context { init, total: z.frobenius_norm_sq(), fit_original: leading_fit(z, 1)?, sigma2 })
    }

    fn evaluate(&self, z: &DenseMatrix, param: (f64, Option<f64>), budget: Budget, setup: &TuningSetup) -> Result<TuningCell> {
        let f = pmd_budget(z, budget, &setup.pmd, Some(&self.init), None)?;
        let fit = (norm2(&z.mul_vec(&f.v)).powi(2) / self.total).clamp(0.0, 1.0);
        let (zeros, total) = match setup.variant {
            Variant::DoublySparse => ((z.rows() - f.nnz_u) + (z.cols() - f.nnz_v), z.rows() + z.cols()),
            Variant::ColumnSparse => (z.cols() - f.nnz_v, z.cols()),
        };
        let is = is_index(fit, self.fit_original, zeros, total, IsOrientation::TradeOff);
        let is_printed = is_index(fit, self.fit_original, zeros, total, IsOrientation::Printed);
        let bic = match self.sigma2 {
            Some(s2) => bic_criterion(z, &f, s2, setup.variant)?,
            None => f64::NAN,
        };
        let cv = match setup.criterion {
            Criterion::Cv => Some(cv_error(z, budget, &setup.cv, &setup.pmd)?),
            _ => None,
        };
        Ok(TuningCell { param, budget, is, is_printed, bic, cv, nnz_u: f.nnz_u, nnz_v: f.nnz_v, fit })
    }
}

type Layout = (Vec<f64>, Option<Vec<f64>>, Vec<(f64, Option<f64>)>);

fn sorted(values: &[f64], name: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{name} grid is empty")));
    }
    if let Some(x) = values.iter().find(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("{name} grid contains {x}")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

fn layout(spec: &GridSpec) -> Result<Layout> {
    match spec {
        GridSpec::OneD { values, .. } => {
            let a = sorted(values, "parameter")?;
            let params = a.iter().map(|&x| (x, None)).collect();
            Ok((a, None, params))
        }
        GridSpec::TwoD { sumabsu, sumabsv } => {
            let a = sorted(sumabsu, "sumabsu")?;
            let b = sorted(sumabsv, "sumabsv")?;
            let params = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, Some(y)))).collect();
            Ok((a, Some(b), params))
        }
    }
}

fn budget_for(spec: &GridSpec, p: (f64, Option<f64>), variant: Variant, n_rows: usize, n_cols: usize) -> Result<Budget> {
    let budget = match (spec, p) {
        (GridSpec::OneD { param: GridParam::Coupled, .. }, (s, _)) => {
            let lower = (1.0 / (n_rows as f64).sqrt()).max(1.0 / (n_cols as f64).sqrt());
            if !(s > lower && s <= 1.0 + 1e-9) {
                return Err(Error::invalid(format!("sumabs = {s} outside ({lower:.6}, 1]")));
            }
            let sv = Some((n_cols as f64).sqrt() * s);
            match variant {
                Variant::DoublySparse => Budget { sumabsu: Some((n_rows as f64).sqrt() * s), sumabsv: sv },
                Variant::ColumnSparse => Budget { sumabsu: None, sumabsv: sv },
            }
        }
        (GridSpec::OneD { param: GridParam::ColumnBudget, .. }, (s, _)) => Budget { sumabsu: None, sumabsv: Some(s) },
        (GridSpec::TwoD { .. }, (su, sv)) => Budget { sumabsu: Some(su), sumabsv: sv },
    };
    budget.validated(n_rows, n_cols)
}

/// Cell indices from sparsest to densest: ascending grid order in one
/// dimension, ascending `sumabsu + sumabsv` (then `sumabsu`) in two.
fn preference_order(params: &[(f64, Option<f64>)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..params.len()).collect();
    idx.sort_by(|&a, &b| {
        let key = |p: (f64, Option<f64>)| (p.0 + p.1.unwrap_or(0.0), p.0);
        let (ka, kb) = (key(params[a]), key(params[b]));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    idx
}

/// Worker count from [`THREADS_ENV`], or `None` for the rayon default.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
