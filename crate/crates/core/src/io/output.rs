use std::fs::{self, File};
use std::path::{Path, PathBuf};

use crate::analysis::TypicalityTable;
use crate::ca::{contributions, CaModel};
use crate::error::Result;
use crate::numerics::DenseMatrix;
use crate::sparse::{sparse_contributions, SparseCaModel};
use crate::tuning::{TuningResult, WeightPath};

/// `%g` with six significant digits; zero is written as `0`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A fitted model whose tables can be written or plotted.
#[derive(Debug, Clone, Copy)]
pub enum FittedModel<'a> {
    Standard(&'a CaModel),
    Sparse(&'a SparseCaModel),
}

impl<'a> From<&'a CaModel> for FittedModel<'a> {
    fn from(m: &'a CaModel) -> Self {
        FittedModel::Standard(m)
    }
}

impl<'a> From<&'a SparseCaModel> for FittedModel<'a> {
    fn from(m: &'a SparseCaModel) -> Self {
        FittedModel::Sparse(m)
    }
}

impl FittedModel<'_> {
    pub fn row_labels(&self) -> &[String] {
        match self {
            FittedModel::Standard(m) => &m.row_labels,
            FittedModel::Sparse(m) => &m.row_labels,
        }
    }

    pub fn col_labels(&self) -> &[String] {
        match self {
            FittedModel::Standard(m) => &m.col_labels,
            FittedModel::Sparse(m) => &m.col_labels,
        }
    }

    pub fn row_coords(&self) -> &DenseMatrix {
        match self {
            FittedModel::Standard(m) => &m.a,
            FittedModel::Sparse(m) => &m.a,
        }
    }

    pub fn col_coords(&self) -> &DenseMatrix {
        match self {
            FittedModel::Standard(m) => &m.b,
            FittedModel::Sparse(m) => &m.b,
        }
    }

    pub fn dims(&self) -> usize {
        self.row_coords().cols()
    }

    /// Eigenvalue of each retained dimension.
    pub fn lambdas(&self) -> &[f64] {
        match self {
            FittedModel::Standard(m) => &m.eigenvalues[..m.dims()],
            FittedModel::Sparse(m) => &m.lambdas,
        }
    }

    pub fn total_inertia(&self) -> f64 {
        match self {
            FittedModel::Standard(m) => m.total_inertia,
            FittedModel::Sparse(m) => m.total_inertia,
        }
    }

    /// Row and column weights; `None` for standard CA.
    pub fn weights(&self) -> Option<(DenseMatrix, DenseMatrix)> {
        match self {
            FittedModel::Standard(_) => None,
            FittedModel::Sparse(m) => Some((m.row_weights(), m.col_weights())),
        }
    }
}

/// Writes `eigenvalues.csv`, `rows.csv` and `cols.csv` into `out_dir`,
/// creating it if needed. Returns the written paths.
pub fn write_tables_csv<'a>(model: impl Into<FittedModel<'a>>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let model = model.into();
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let paths = ["eigenvalues.csv", "rows.csv", "cols.csv"].map(|f| dir.join(f));
    write_eigenvalues(model, &paths[0])?;
    let (row_ctr, col_ctr, weights) = match model {
        FittedModel::Standard(m) => {
            let c = contributions(m);
            (c.rows, c.cols, None)
        }
        FittedModel::Sparse(m) => {
            let c = sparse_contributions(m);
            (c.row_weight_contrib, c.col_weight_contrib, Some((c.row_weights, c.col_weights)))
        }
    };
    let (rw, cw) = match weights {
        Some((r, c)) => (Some(r), Some(c)),
        None => (None, None),
    };
    write_category_table(&paths[1], model.row_labels(), rw.as_ref(), &row_ctr, model.row_coords())?;
    write_category_table(&paths[2], model.col_labels(), cw.as_ref(), &col_ctr, model.col_coords())?;
    Ok(paths.to_vec())
}

fn write_eigenvalues(model: FittedModel<'_>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let total = model.total_inertia();
    let (lambdas, explained): (&[f64], Option<(&[f64], &[f64])>) = match model {
        FittedModel::Standard(m) => (&m.eigenvalues, None),
        FittedModel::Sparse(m) => (&m.lambdas, Some((&m.explained, &m.explained_cumulative))),
    };
    let mut header = vec!["dim", "eigenvalue", "percent", "cumulative_percent"];
    if explained.is_some() {
        header.extend(["explained_percent", "explained_cumulative_percent"]);
    }
    w.write_record(&header)?;
    let mut cumulative = 0.0;
    for (k, &l) in lambdas.iter().enumerate() {
        cumulative += l;
        let mut rec = vec![(k + 1).to_string(), format_sig(l), format_sig(100.0 * l / total), format_sig(100.0 * cumulative / total)];
        if let Some((e, ec)) = explained {
            rec.push(format_sig(100.0 * e[k]));
            rec.push(format_sig(100.0 * ec[k]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_category_table(
    path: &Path,
    labels: &[String],
    weights: Option<&DenseMatrix>,
    ctr: &DenseMatrix,
    coords: &DenseMatrix,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    let k = coords.cols();
    let mut header = vec!["label".to_string()];
    if weights.is_some() {
        header.extend((1..=k).map(|d| format!("weight{d}")));
    }
    header.extend((1..=k).map(|d| format!("ctr{d}")));
    header.extend((1..=k).map(|d| format!("coord{d}")));
    w.write_record(&header)?;
    for (i, label) in labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        if let Some(wt) = weights {
            rec.extend(wt.row(i).iter().map(|&x| format_sig(x)));
        }
        rec.extend(ctr.row(i).iter().map(|&x| format_sig(x)));
        rec.extend(coords.row(i).iter().map(|&x| format_sig(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One line per grid cell and dimension, the selected cell flagged.
pub fn write_tuning_grid_csv(results: &[TuningResult], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record([
        "dim", "param1", "param2", "sumabsu", "sumabsv", "nnz_u", "nnz_v", "fit", "is", "is_printed", "bic", "cv", "selected",
    ])?;
    let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
    for (d, r) in results.iter().enumerate() {
        for (idx, c) in r.grid.cells.iter().enumerate() {
            w.write_record([
                (d + 1).to_string(),
                format_sig(c.param.0),
                opt(c.param.1),
                opt(c.budget.sumabsu),
                opt(c.budget.sumabsv),
                c.nnz_u.to_string(),
                c.nnz_v.to_string(),
                format_sig(c.fit),
                format_sig(c.is),
                format_sig(c.is_printed),
                format_sig(c.bic),
                opt(c.cv),
                u8::from(idx == r.optimum_index).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `label,cluster` with clusters numbered from 1.
pub fn write_clusters_csv(labels: &[String], assignment: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(["label", "cluster"])?;
    for (l, c) in labels.iter().zip(assignment) {
        w.write_record([l.clone(), (c + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// The top categories of every cluster with their z-scores.
pub fn write_typicality_csv(t: &TypicalityTable, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(["cluster", "size", "rank", "category", "z"])?;
    for c in &t.clusters {
        for (rank, (cat, z)) in c.top.iter().enumerate() {
            w.write_record([c.label.clone(), format_sig(c.size), (rank + 1).to_string(), cat.clone(), format_sig(*z)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long format `param,side,label,weight`.
pub fn write_paths_csv(p: &WeightPath, row_labels: &[String], col_labels: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(["param", "side", "label", "weight"])?;
    for (s, param) in p.params.iter().enumerate() {
        for (side, labels, weights) in [("row", row_labels, &p.u[s]), ("col", col_labels, &p.v[s])] {
            for (l, x) in labels.iter().zip(weights) {
                w.write_record([format_sig(*param), side.to_string(), l.clone(), format_sig(*x)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
