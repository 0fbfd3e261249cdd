use std::fs;

use sparse_ca::analysis::{aggregate_by_cluster, cut_tree, typicality_zscores, ward_cluster, WardVariant};
use sparse_ca::ca::{correspondence_matrix, fit_ca, standardized_residuals, ContingencyTable};
use sparse_ca::io::{
    build_dtm, format_sig, read_contingency_csv, write_clusters_csv, write_contingency_csv, write_paths_csv,
    write_tables_csv, write_tuning_grid_csv, write_typicality_csv, DtmOptions, FittedModel,
};
use sparse_ca::numerics::DenseMatrix;
use sparse_ca::plot::{write_svg, LabelFilter, PlotInput, PlotKind, PlotSpec};
use sparse_ca::sparse::{fit_sparse_ca, ColumnScale, SparseCaModel, SparseCaOptions, SparsityConstraint, Variant};
use sparse_ca::tuning::{
    default_absolute_grid, default_column_grid, default_coupled_grid, tune_sequential, weight_paths, Criterion,
    CvOptions, GridParam, GridSpec, TuningSetup,
};
use sparse_ca::{Axis, Error, Result};

use crate::args::*;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn load(input: &Input) -> Result<ContingencyTable> {
    let t = read_contingency_csv(&input.table, input.drop_empty)?;
    fs::create_dir_all(&input.out)?;
    Ok(t)
}

fn residuals(t: &ContingencyTable) -> Result<DenseMatrix> {
    let corr = correspondence_matrix(t)?;
    Ok(standardized_residuals(&corr.p, &corr.r, &corr.c))
}

fn variant(v: VariantArg) -> Variant {
    match v {
        VariantArg::Doubly => Variant::DoublySparse,
        VariantArg::Column => Variant::ColumnSparse,
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn pct(x: f64) -> String {
    format!("{}%", format_sig(100.0 * x))
}

pub fn ca(args: &CaArgs) -> Result<()> {
    let t = load(&args.input)?;
    let m = fit_ca(&t, args.dims)?;
    write_tables_csv(&m, &args.input.out)?;
    println!("dim\teigenvalue\tpercent");
    for (k, (l, s)) in m.eigenvalues.iter().zip(m.inertia_shares()).enumerate() {
        println!("{}\t{}\t{}", k + 1, format_sig(*l), pct(s));
    }
    println!("total inertia\t{}", format_sig(m.total_inertia));
    if !args.no_plot {
        let model = FittedModel::from(&m);
        write_svg(PlotInput::Model(model), &PlotSpec::new(PlotKind::Scree), args.input.out.join("scree.svg"))?;
        if m.dims() >= 2 {
            let spec = PlotSpec { title: Some("CA map".into()), ..PlotSpec::new(PlotKind::SymmetricMap) };
            write_svg(PlotInput::Model(model), &spec, args.input.out.join("map.svg"))?;
        }
    }
    Ok(())
}

/// Expands per-dimension lists, broadcasting single values.
fn expand<T: Copy>(name: &str, values: &Option<Vec<T>>, k: usize) -> Result<Option<Vec<T>>> {
    match values {
        None => Ok(None),
        Some(v) if v.len() == 1 => Ok(Some(vec![v[0]; k])),
        Some(v) if v.len() == k => Ok(Some(v.clone())),
        Some(v) => Err(invalid(format!("--{name} has {} values for {k} dimensions", v.len()))),
    }
}

pub fn constraints(s: &Sparsity, dims: Option<usize>) -> Result<Vec<SparsityConstraint>> {
    let lens = [
        s.sumabs.as_ref().map(Vec::len),
        s.sumabsu.as_ref().map(Vec::len),
        s.sumabsv.as_ref().map(Vec::len),
        s.nnz.as_ref().map(Vec::len),
    ];
    let k = dims.unwrap_or_else(|| lens.iter().flatten().copied().max().unwrap_or(1));
    if k == 0 {
        return Err(invalid("--dims must be positive"));
    }
    if let Some(v) = expand("sumabs", &s.sumabs, k)? {
        return Ok(v.into_iter().map(|sumabs| SparsityConstraint::Coupled { sumabs }).collect());
    }
    if let Some(v) = expand("nnz", &s.nnz, k)? {
        return Ok(v.into_iter().map(|count| SparsityConstraint::NonzeroTarget { count, axis: Axis::Cols }).collect());
    }
    match (expand("sumabsu", &s.sumabsu, k)?, expand("sumabsv", &s.sumabsv, k)?) {
        (Some(u), Some(v)) => {
            Ok(u.into_iter().zip(v).map(|(sumabsu, sumabsv)| SparsityConstraint::Absolute { sumabsu, sumabsv }).collect())
        }
        (None, Some(v)) => Ok(v.into_iter().map(|sumabsv| SparsityConstraint::UnpenalizedRows { sumabsv }).collect()),
        (Some(_), None) => Err(invalid("--sumabsu needs --sumabsv")),
        (None, None) => Err(invalid("give one of --sumabs, --sumabsu/--sumabsv or --nnz")),
    }
}

fn fit_sparse(t: &ContingencyTable, s: &Sparsity, dims: Option<usize>, v: VariantArg, scale: ColScaleArg) -> Result<SparseCaModel> {
    let col_scale = match scale {
        ColScaleArg::Barycentric => ColumnScale::Barycentric,
        ColScaleArg::Rescaled => ColumnScale::Rescaled,
    };
    let opts = SparseCaOptions { col_scale, ..Default::default() };
    fit_sparse_ca(t, &constraints(s, dims)?, variant(v), &opts)
}

pub fn sca(args: &ScaArgs) -> Result<()> {
    let t = load(&args.input)?;
    let m = fit_sparse(&t, &args.sparsity, args.dims, args.variant, args.col_scale)?;
    warn_all(&m.warnings);
    write_tables_csv(&m, &args.input.out)?;
    println!("dim\tlambda\tpercent\tnnz_u\tnnz_v\tsumabsu\tsumabsv");
    let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_else(|| "-".into());
    for (k, f) in m.factors.iter().enumerate() {
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            k + 1,
            format_sig(f.lambda),
            pct(m.inertia_shares()[k]),
            f.nnz_u,
            f.nnz_v,
            opt(f.budget.sumabsu),
            opt(f.budget.sumabsv)
        );
        if let Some(Some(s)) = m.searches.get(k) {
            println!("  nonzero target: sumabsv = {} gives {} nonzeros", format_sig(s.sumabs), s.achieved);
        }
    }
    println!("explained variance\t{}", pct(m.explained_cumulative.last().copied().unwrap_or(0.0)));
    if !args.no_plot && m.dims() >= 2 {
        let filter = if args.nonzero_only { LabelFilter::NonzeroOnly } else { LabelFilter::All };
        let spec = PlotSpec { filter, title: Some("Sparse CA map".into()), ..PlotSpec::new(PlotKind::SymmetricMap) };
        write_svg(PlotInput::Model((&m).into()), &spec, args.input.out.join("map.svg"))?;
    }
    Ok(())
}

fn grid_param(p: Option<ParamArg>, v: VariantArg) -> GridParam {
    match (p, v) {
        (Some(ParamArg::Coupled), _) | (None, VariantArg::Doubly) => GridParam::Coupled,
        (Some(ParamArg::Budget), _) | (None, VariantArg::Column) => GridParam::ColumnBudget,
    }
}

fn default_grid(param: GridParam, t: &ContingencyTable) -> Vec<f64> {
    match param {
        GridParam::Coupled => default_coupled_grid(t.n_rows(), t.n_cols()),
        GridParam::ColumnBudget => default_column_grid(t.n_cols()),
    }
}

pub fn tune(args: &TuneArgs) -> Result<()> {
    let t = load(&args.input)?;
    let z = residuals(&t)?;
    let spec = if args.grid_2d {
        let u = args.grid_u.clone().unwrap_or_else(|| default_absolute_grid(t.n_rows(), args.grid_step));
        let v = args.grid_v.clone().unwrap_or_else(|| default_absolute_grid(t.n_cols(), args.grid_step));
        GridSpec::TwoD { sumabsu: u, sumabsv: v }
    } else {
        let param = grid_param(args.param, args.variant);
        let values = match &args.grid_1d {
            Some(v) if !v.is_empty() => v.clone(),
            _ => default_grid(param, &t),
        };
        GridSpec::OneD { values, param }
    };
    let criterion = match args.criterion {
        CriterionArg::Is => Criterion::Is,
        CriterionArg::IsPrinted => Criterion::IsPrinted,
        CriterionArg::Bic => Criterion::Bic,
        CriterionArg::Cv => Criterion::Cv,
    };
    let mut setup = TuningSetup::new(variant(args.variant), criterion);
    setup.cv = CvOptions { seed: args.seed, folds: args.folds, repeats: args.repeats, ..CvOptions::default() };
    let results = tune_sequential(&z, args.dims, &spec, &setup)?;
    write_tuning_grid_csv(&results, args.input.out.join("tuning_grid.csv"))?;
    for (d, r) in results.iter().enumerate() {
        let param = match r.optimum {
            (a, None) => format_sig(a),
            (a, Some(b)) => format!("({}, {})", format_sig(a), format_sig(b)),
        };
        println!(
            "dim {}: optimum {param}\t{} = {}\tnnz = ({}, {})",
            d + 1,
            criterion.name(),
            format_sig(r.optimum_value),
            r.optimum_nnz.0,
            r.optimum_nnz.1
        );
        if r.too_sparse {
            eprintln!("warning: dimension {} optimum keeps a single nonzero weight on a penalized side", d + 1);
        }
        if !args.no_plot {
            let kind = if args.grid_2d { PlotKind::Contour } else { PlotKind::CriterionCurve };
            let name = if args.grid_2d { "contour" } else { "criterion" };
            write_svg(PlotInput::Tuning(r), &PlotSpec::new(kind), args.input.out.join(format!("{name}_dim{}.svg", d + 1)))?;
        }
    }
    Ok(())
}

pub fn paths(args: &PathsArgs) -> Result<()> {
    let t = load(&args.input)?;
    let z = residuals(&t)?;
    let param = grid_param(args.param, args.variant);
    let grid = args.grid.clone().unwrap_or_else(|| default_grid(param, &t));
    let p = weight_paths(&z, &grid, param, variant(args.variant), &Default::default())?;
    write_paths_csv(&p, t.row_labels(), t.col_labels(), args.input.out.join("paths.csv"))?;
    println!("param\tnnz_u\tnnz_v");
    for (s, (nu, nv)) in p.params.iter().zip(p.nonzeros()) {
        println!("{}\t{nu}\t{nv}", format_sig(*s));
    }
    if !args.no_plot {
        let labels = match args.side {
            SideArg::Rows => t.row_labels(),
            SideArg::Cols => t.col_labels(),
        };
        write_svg(PlotInput::Paths { path: &p, labels }, &PlotSpec::new(PlotKind::WeightPath), args.input.out.join("paths.svg"))?;
    }
    Ok(())
}

pub fn cluster(args: &ClusterArgs) -> Result<()> {
    let t = load(&args.input)?;
    let sparse;
    let standard;
    let model: FittedModel = if args.sparsity.is_set() {
        sparse = fit_sparse(&t, &args.sparsity, Some(args.dims), args.variant, ColScaleArg::Rescaled)?;
        warn_all(&sparse.warnings);
        (&sparse).into()
    } else {
        standard = fit_ca(&t, args.dims)?;
        (&standard).into()
    };
    let ward = if args.ward_d { WardVariant::D } else { WardVariant::D2 };
    let tree = ward_cluster(model.row_coords(), model.row_labels(), ward)?;
    let assignment = cut_tree(&tree, args.k)?;
    let counts = aggregate_by_cluster(t.counts(), &assignment, args.k)?;
    let names: Vec<String> = (1..=args.k).map(|c| c.to_string()).collect();
    let typ = typicality_zscores(&counts, &names, t.col_labels(), args.top_words)?;
    warn_all(&typ.warnings);
    let out = &args.input.out;
    write_clusters_csv(t.row_labels(), &assignment, out.join("clusters.csv"))?;
    write_typicality_csv(&typ, out.join("typicality.csv"))?;
    for c in &typ.clusters {
        let words: Vec<String> = c.top.iter().map(|(w, z)| format!("{w} ({})", format_sig(*z))).collect();
        println!("cluster {} ({}): {}", c.label, format_sig(c.size), words.join(", "));
    }
    if !args.no_plot {
        write_svg(PlotInput::Dendrogram(&tree), &PlotSpec::new(PlotKind::Dendrogram), out.join("dendrogram.svg"))?;
        if model.dims() >= 2 {
            let input = PlotInput::Clusters { model, assignment: &assignment, typicality: Some(&typ) };
            write_svg(input, &PlotSpec::new(PlotKind::ClusterMap), out.join("clusters.svg"))?;
        }
    }
    Ok(())
}

pub fn dtm(args: &DtmArgs) -> Result<()> {
    let opts = DtmOptions { min_count: args.min_count, max_vocab: args.max_vocab };
    let t = build_dtm(&args.token_counts, args.stoplist.as_deref(), opts)?;
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_contingency_csv(&args.out, &t)?;
    println!("{} documents x {} tokens ({} counts); tokens are not stemmed", t.n_rows(), t.n_cols(), format_sig(t.total()));
    Ok(())
}
