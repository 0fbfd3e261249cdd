//! SVG rendering of maps, paths, tuning curves and dendrograms.
//!
//! Every chart wraps its data marks in a `<g class="plot-area">` whose
//! `data-*` attributes give the data-to-pixel mapping, so plotted values can
//! be recovered from the file.

mod canvas;

use std::path::Path;

use canvas::{padded, Frame, Svg, PALETTE};

use crate::analysis::{Dendrogram, TypicalityTable};
use crate::error::{Error, Result};
use crate::io::{format_sig, FittedModel};
use crate::tuning::{TuningResult, WeightPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    SymmetricMap,
    WeightPath,
    CriterionCurve,
    Contour,
    Scree,
    Dendrogram,
    ClusterMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelFilter {
    #[default]
    All,
    /// Skip categories whose weight is zero on every plotted dimension.
    NonzeroOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    /// Zero-based dimensions on the horizontal and vertical axes.
    pub dims: (usize, usize),
    pub filter: LabelFilter,
    pub title: Option<String>,
}

impl PlotSpec {
    pub fn new(kind: PlotKind) -> Self {
        PlotSpec { kind, dims: (0, 1), filter: LabelFilter::All, title: None }
    }
}

/// Artifact to draw.
#[derive(Debug, Clone, Copy)]
pub enum PlotInput<'a> {
    Model(FittedModel<'a>),
    Paths { path: &'a WeightPath, labels: &'a [String] },
    Tuning(&'a TuningResult),
    Dendrogram(&'a Dendrogram),
    Clusters { model: FittedModel<'a>, assignment: &'a [usize], typicality: Option<&'a TypicalityTable> },
}

/// Renders `input` as the chart selected by `spec.kind`.
pub fn render_svg(input: PlotInput<'_>, spec: &PlotSpec) -> Result<String> {
    let title = |default: &str| spec.title.clone().unwrap_or_else(|| default.to_string());
    match (spec.kind, input) {
        (PlotKind::SymmetricMap, PlotInput::Model(m)) => symmetric_map(m, spec.dims, spec.filter, &title("Symmetric map")),
        (PlotKind::Scree, PlotInput::Model(m)) => Ok(scree(m, &title("Eigenvalues"))),
        (PlotKind::WeightPath, PlotInput::Paths { path, labels }) => weight_path(path, labels, &title("Weight paths")),
        (PlotKind::CriterionCurve, PlotInput::Tuning(r)) => criterion_curve(r, &title(&format!("Criterion: {}", r.criterion.name()))),
        (PlotKind::Contour, PlotInput::Tuning(r)) => contour(r, &title(&format!("Criterion: {}", r.criterion.name()))),
        (PlotKind::Dendrogram, PlotInput::Dendrogram(d)) => dendrogram(d, &title("Ward dendrogram")),
        (PlotKind::ClusterMap, PlotInput::Clusters { model, assignment, typicality }) => {
            cluster_map(model, assignment, typicality, spec.dims, &title("Clusters"))
        }
        (kind, _) => Err(Error::invalid(format!("{kind:?} cannot be drawn from this input"))),
    }
}

/// Renders and writes to `path`.
pub fn write_svg(input: PlotInput<'_>, spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(input, spec)?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn check_dims(model: &FittedModel<'_>, dims: (usize, usize)) -> Result<()> {
    let k = model.dims();
    if dims.0 >= k || dims.1 >= k {
        return Err(Error::invalid(format!("dimensions ({}, {}) out of range for a {k}-dimensional fit", dims.0 + 1, dims.1 + 1)));
    }
    if dims.0 == dims.1 {
        return Err(Error::invalid("the two plotted dimensions must differ"));
    }
    Ok(())
}

fn axis_title(model: &FittedModel<'_>, d: usize) -> String {
    let l = model.lambdas()[d];
    format!("Dimension {}: λ = {} ({}%)", d + 1, format_sig(l), format_sig(100.0 * l / model.total_inertia()))
}

/// Indices to draw on each side under `filter`.
fn visible(model: &FittedModel<'_>, dims: (usize, usize), filter: LabelFilter) -> (Vec<usize>, Vec<usize>) {
    let all = (0..model.row_labels().len()).collect::<Vec<_>>();
    let all_cols = (0..model.col_labels().len()).collect::<Vec<_>>();
    match (filter, model.weights()) {
        (LabelFilter::NonzeroOnly, Some((u, v))) => {
            let keep = |w: &crate::numerics::DenseMatrix, i: usize| w[(i, dims.0)] != 0.0 || w[(i, dims.1)] != 0.0;
            (all.into_iter().filter(|&i| keep(&u, i)).collect(), all_cols.into_iter().filter(|&j| keep(&v, j)).collect())
        }
        _ => (all, all_cols),
    }
}

fn symmetric_map(model: FittedModel<'_>, dims: (usize, usize), filter: LabelFilter, title: &str) -> Result<String> {
    check_dims(&model, dims)?;
    let (rows, cols) = visible(&model, dims, filter);
    let (a, b) = (model.row_coords(), model.col_coords());
    let xs = rows.iter().map(|&i| a[(i, dims.0)]).chain(cols.iter().map(|&j| b[(j, dims.0)])).chain([0.0]);
    let ys = rows.iter().map(|&i| a[(i, dims.1)]).chain(cols.iter().map(|&j| b[(j, dims.1)])).chain([0.0]);
    let f = Frame::equal_aspect(padded(xs), padded(ys));
    let mut svg = Svg::new(title);
    svg.axes(&f, &axis_title(&model, dims.0), &axis_title(&model, dims.1), true);
    svg.begin_plot(&f);
    for (side, idx, coords, labels, colour) in
        [("row", &rows, a, model.row_labels(), PALETTE[0]), ("col", &cols, b, model.col_labels(), PALETTE[1])]
    {
        for &i in idx.iter() {
            let (x, y) = (f.px(coords[(i, dims.0)]), f.py(coords[(i, dims.1)]));
            svg.point(x, y, &format!("point {side}"), &labels[i], colour);
        }
    }
    svg.end_plot();
    for (idx, coords, labels, colour) in [(&rows, a, model.row_labels(), PALETTE[0]), (&cols, b, model.col_labels(), PALETTE[1])] {
        for &i in idx.iter() {
            svg.label(f.px(coords[(i, dims.0)]), f.py(coords[(i, dims.1)]), &labels[i], colour);
        }
    }
    Ok(svg.finish())
}

fn scree(model: FittedModel<'_>, title: &str) -> String {
    let values: &[f64] = match model {
        FittedModel::Standard(m) => &m.eigenvalues,
        FittedModel::Sparse(m) => &m.lambdas,
    };
    let n = values.len();
    let top = values.iter().cloned().fold(0.0, f64::max);
    let f = Frame::new((0.4, n as f64 + 0.6), (0.0, if top > 0.0 { top * 1.1 } else { 1.0 }));
    let mut svg = Svg::new(title);
    svg.axes(&f, "Dimension", "Eigenvalue", false);
    svg.begin_plot(&f);
    let half = 0.35 * f.width / (f.x.1 - f.x.0);
    for (k, &l) in values.iter().enumerate() {
        let x = f.px(k as f64 + 1.0);
        let (y, base) = (f.py(l), f.py(0.0));
        svg.raw(&format!(
            r##"<rect class="bar" data-value="{l}" x="{:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="#4c72b0"/>"##,
            x - half,
            2.0 * half,
            base - y
        ));
        svg.text(x, y - 4.0, &format!("{}%", format_sig(100.0 * l / model.total_inertia())), "middle", "bar-label");
    }
    svg.end_plot();
    svg.finish()
}

fn weight_path(path: &WeightPath, labels: &[String], title: &str) -> Result<String> {
    let side = if path.u.first().is_some_and(|u| u.len() == labels.len()) {
        &path.u
    } else if path.v.first().is_some_and(|v| v.len() == labels.len()) {
        &path.v
    } else {
        return Err(Error::invalid("labels match neither side of the weight path"));
    };
    let f = Frame::new(padded(path.params.iter().cloned()), padded(side.iter().flatten().cloned().chain([0.0])));
    let mut svg = Svg::new(title);
    svg.axes(&f, "Sparsity parameter", "Weight", true);
    svg.begin_plot(&f);
    for (i, label) in labels.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = path.params.iter().zip(side).map(|(&p, w)| (f.px(p), f.py(w[i]))).collect();
        if pts.len() > 1 {
            svg.polyline(&pts, "path", label, colour);
        }
        for &(x, y) in &pts {
            svg.point(x, y, "point", label, colour);
        }
    }
    svg.end_plot();
    let last = side.len() - 1;
    for (i, label) in labels.iter().enumerate() {
        if side[last][i] != 0.0 {
            svg.label(f.px(path.params[last]), f.py(side[last][i]), label, PALETTE[i % PALETTE.len()]);
        }
    }
    Ok(svg.finish())
}

fn criterion_curve(r: &TuningResult, title: &str) -> Result<String> {
    if r.grid.axis2.is_some() {
        return Err(Error::invalid("a criterion curve needs a one-dimensional grid; use a contour plot"));
    }
    let values: Vec<f64> = r.grid.cells.iter().map(|c| c.value(r.criterion)).collect();
    let f = Frame::new(padded(r.grid.axis1.iter().cloned()), padded(values.iter().cloned()));
    let mut svg = Svg::new(title);
    svg.axes(&f, "Sparsity parameter", r.criterion.name(), false);
    svg.begin_plot(&f);
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut runs = Vec::new();
    for (&p, &v) in r.grid.axis1.iter().zip(&values) {
        if v.is_finite() {
            run.push((f.px(p), f.py(v)));
        } else if !run.is_empty() {
            runs.push(std::mem::take(&mut run));
        }
    }
    runs.push(run);
    for run in runs.iter().filter(|r| r.len() > 1) {
        svg.polyline(run, "curve", r.criterion.name(), PALETTE[0]);
    }
    for (&p, &v) in r.grid.axis1.iter().zip(&values) {
        if v.is_finite() {
            svg.point(f.px(p), f.py(v), "point", &format_sig(p), PALETTE[0]);
        }
    }
    let x = f.px(r.optimum.0);
    svg.line(x, f.top, x, f.top + f.height, "optimum-line", PALETTE[1], true);
    if r.optimum_value.is_finite() {
        svg.point(x, f.py(r.optimum_value), "optimum", &format_sig(r.optimum.0), PALETTE[1]);
    }
    svg.end_plot();
    let (nu, nv) = r.optimum_nnz;
    svg.label(x, f.top + 14.0, &format!("{} ({nu}, {nv})", format_sig(r.optimum.0)), PALETTE[1]);
    Ok(svg.finish())
}

/// Filled grid with iso-lines of the criterion over a two-parameter grid.
fn contour(r: &TuningResult, title: &str) -> Result<String> {
    let ys = r.grid.axis2.as_ref().ok_or_else(|| Error::invalid("a contour plot needs a two-dimensional grid"))?;
    let xs = &r.grid.axis1;
    let (nx, ny) = (xs.len(), ys.len());
    let value = |i: usize, j: usize| r.grid.cells[i * ny + j].value(r.criterion);
    let finite: Vec<f64> = r.grid.cells.iter().map(|c| c.value(r.criterion)).filter(|v| v.is_finite()).collect();
    let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let half_step = |a: &[f64], k: usize| {
        if a.len() < 2 {
            0.5
        } else if k + 1 < a.len() {
            0.5 * (a[k + 1] - a[k])
        } else {
            0.5 * (a[k] - a[k - 1])
        }
    };
    let f = Frame::new(
        (xs[0] - half_step(xs, 0), xs[nx - 1] + half_step(xs, nx - 1)),
        (ys[0] - half_step(ys, 0), ys[ny - 1] + half_step(ys, ny - 1)),
    );
    let mut svg = Svg::new(title);
    svg.axes(&f, "sumabsu", "sumabsv", false);
    svg.begin_plot(&f);
    for i in 0..nx {
        for j in 0..ny {
            let v = value(i, j);
            let fill = if v.is_finite() { shade(if hi > lo { (v - lo) / (hi - lo) } else { 0.5 }) } else { "#ffffff".into() };
            let (x0, x1) = (f.px(xs[i] - half_step(xs, i)), f.px(xs[i] + half_step(xs, i)));
            let (y0, y1) = (f.py(ys[j] + half_step(ys, j)), f.py(ys[j] - half_step(ys, j)));
            svg.raw(&format!(
                r#"<rect class="cell" data-value="{v}" x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                x1 - x0,
                y1 - y0
            ));
        }
    }
    if hi > lo && nx > 1 && ny > 1 {
        for level in (1..=6).map(|k| lo + (hi - lo) * k as f64 / 7.0) {
            for seg in iso_segments(xs, ys, &value, level) {
                svg.line(f.px(seg.0 .0), f.py(seg.0 .1), f.px(seg.1 .0), f.py(seg.1 .1), "contour", "#222222", false);
            }
        }
    }
    let opt_y = r.optimum.1.unwrap_or(ys[0]);
    svg.point(f.px(r.optimum.0), f.py(opt_y), "optimum", &format!("{}, {}", format_sig(r.optimum.0), format_sig(opt_y)), PALETTE[1]);
    svg.end_plot();
    Ok(svg.finish())
}

fn shade(t: f64) -> String {
    // light yellow to dark blue
    let lerp = |a: f64, b: f64| (a + (b - a) * t.clamp(0.0, 1.0)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(247.0, 48.0), lerp(188.0, 107.0))
}

type Segment = ((f64, f64), (f64, f64));

/// Marching squares over the grid corners.
fn iso_segments(xs: &[f64], ys: &[f64], value: &dyn Fn(usize, usize) -> f64, level: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| value(a, b));
            if vals.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (p, q) = (corners[e], corners[(e + 1) % 4]);
                let (vp, vq) = (vals[e], vals[(e + 1) % 4]);
                if (vp < level) != (vq < level) {
                    let t = (level - vp) / (vq - vp);
                    hits.push((xs[p.0] + t * (xs[q.0] - xs[p.0]), ys[p.1] + t * (ys[q.1] - ys[p.1])));
                }
            }
            for pair in hits.chunks_exact(2) {
                out.push((pair[0], pair[1]));
            }
        }
    }
    out
}

fn dendrogram(d: &Dendrogram, title: &str) -> Result<String> {
    let n = d.n_leaves();
    if n == 0 {
        return Err(Error::invalid("empty dendrogram"));
    }
    let order = d.leaf_order();
    let mut x = vec![0.0; n + d.merges.len()];
    let mut h = vec![0.0; n + d.merges.len()];
    for (pos, &leaf) in order.iter().enumerate() {
        x[leaf] = pos as f64;
    }
    for (s, m) in d.merges.iter().enumerate() {
        x[n + s] = 0.5 * (x[m.left] + x[m.right]);
        h[n + s] = m.height;
    }
    let top = d.merges.iter().map(|m| m.height).fold(0.0, f64::max);
    let f = Frame::new((-0.5, n as f64 - 0.5), (0.0, if top > 0.0 { top * 1.05 } else { 1.0 }));
    let mut svg = Svg::new(title);
    svg.axes(&f, "", "Height", false);
    svg.begin_plot(&f);
    for (s, m) in d.merges.iter().enumerate() {
        let node = n + s;
        let pts = [(x[m.left], h[m.left]), (x[m.left], h[node]), (x[m.right], h[node]), (x[m.right], h[m.right])];
        let px: Vec<(f64, f64)> = pts.iter().map(|&(a, b)| (f.px(a), f.py(b))).collect();
        svg.polyline(&px, "link", &format!("merge {}", s + 1), "#333333");
    }
    svg.end_plot();
    for (pos, &leaf) in order.iter().enumerate() {
        let (lx, ly) = (f.px(pos as f64) + 4.0, f.top + f.height + 8.0);
        svg.raw(&format!(
            r#"<text class="leaf" x="{lx:.3}" y="{ly:.3}" text-anchor="end" transform="rotate(-90 {lx:.3} {ly:.3})">{}</text>"#,
            canvas::escape(&d.labels[leaf])
        ));
    }
    Ok(svg.finish())
}

fn cluster_map(
    model: FittedModel<'_>,
    assignment: &[usize],
    typicality: Option<&TypicalityTable>,
    dims: (usize, usize),
    title: &str,
) -> Result<String> {
    check_dims(&model, dims)?;
    let a = model.row_coords();
    if assignment.len() != a.rows() {
        return Err(Error::invalid(format!("{} assignments for {} rows", assignment.len(), a.rows())));
    }
    let xs = (0..a.rows()).map(|i| a[(i, dims.0)]).chain([0.0]);
    let ys = (0..a.rows()).map(|i| a[(i, dims.1)]).chain([0.0]);
    let f = Frame::equal_aspect(padded(xs), padded(ys));
    let mut svg = Svg::new(title);
    svg.axes(&f, &axis_title(&model, dims.0), &axis_title(&model, dims.1), true);
    svg.begin_plot(&f);
    for (i, label) in model.row_labels().iter().enumerate() {
        let c = assignment[i];
        svg.point(f.px(a[(i, dims.0)]), f.py(a[(i, dims.1)]), &format!("point row cluster{}", c + 1), label, PALETTE[c % PALETTE.len()]);
    }
    svg.end_plot();
    for (i, label) in model.row_labels().iter().enumerate() {
        svg.label(f.px(a[(i, dims.0)]), f.py(a[(i, dims.1)]), label, PALETTE[assignment[i] % PALETTE.len()]);
    }
    let n_clusters = assignment.iter().max().map_or(0, |m| m + 1);
    for c in 0..n_clusters {
        let members: Vec<usize> = (0..a.rows()).filter(|&i| assignment[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        let cx = members.iter().map(|&i| a[(i, dims.0)]).sum::<f64>() / members.len() as f64;
        let cy = members.iter().map(|&i| a[(i, dims.1)]).sum::<f64>() / members.len() as f64;
        let mut text = format!("Cluster {}", c + 1);
        if let Some(t) = typicality.and_then(|t| t.clusters.iter().find(|k| k.label == format!("{}", c + 1))) {
            let words: Vec<&str> = t.top.iter().map(|(w, _)| w.as_str()).collect();
            text = format!("{text}: {}", words.join(", "));
        }
        svg.label(f.px(cx), f.py(cy), &text, PALETTE[c % PALETTE.len()]);
    }
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ward_cluster, WardVariant};
    use crate::ca::{fit_ca, ContingencyTable};
    use crate::numerics::DenseMatrix;
    use crate::sparse::{fit_sparse_ca, SparseCaOptions, SparsityConstraint, Variant};
    use crate::tuning::{grid_search, weight_paths, Criterion, GridParam, GridSpec, TuningSetup};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(i: usize, j: usize, seed: u64) -> ContingencyTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DenseMatrix::from_fn(i, j, |_, _| rng.gen_range(1.0..50.0f64).round());
        ContingencyTable::new(m, (0..i).map(|k| format!("row<{k}>")).collect(), (0..j).map(|k| format!("col {k}")).collect())
            .unwrap()
    }

    struct Mapping {
        left: f64,
        top: f64,
        width: f64,
        height: f64,
        x: (f64, f64),
        y: (f64, f64),
    }

    fn mapping(doc: &roxmltree::Document) -> Mapping {
        let g = doc.descendants().find(|n| n.attribute("class") == Some("plot-area")).unwrap();
        let a = |k: &str| g.attribute(k).unwrap().parse::<f64>().unwrap();
        Mapping {
            left: a("data-left"),
            top: a("data-top"),
            width: a("data-width"),
            height: a("data-height"),
            x: (a("data-xmin"), a("data-xmax")),
            y: (a("data-ymin"), a("data-ymax")),
        }
    }

    impl Mapping {
        fn back(&self, cx: f64, cy: f64) -> (f64, f64) {
            (
                self.x.0 + (cx - self.left) / self.width * (self.x.1 - self.x.0),
                self.y.1 - (cy - self.top) / self.height * (self.y.1 - self.y.0),
            )
        }
    }

    fn points(doc: &roxmltree::Document, class: &str) -> Vec<(String, f64, f64)> {
        doc.descendants()
            .filter(|n| n.tag_name().name() == "circle" && n.attribute("class").is_some_and(|c| c.split(' ').any(|p| p == class)))
            .map(|n| {
                let f = |k| n.attribute(k).unwrap().parse::<f64>().unwrap();
                (n.attribute("data-label").unwrap().to_string(), f("cx"), f("cy"))
            })
            .collect()
    }

    #[test]
    fn map_points_back_map_to_coordinates() {
        let m = fit_ca(&table(10, 9, 1), 3).unwrap();
        let spec = PlotSpec { dims: (0, 2), ..PlotSpec::new(PlotKind::SymmetricMap) };
        let svg = render_svg(PlotInput::Model((&m).into()), &spec).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let map = mapping(&doc);
        let tol = 1e-3 * (map.x.1 - map.x.0) / map.width;
        let rows = points(&doc, "row");
        let cols = points(&doc, "col");
        assert_eq!((rows.len(), cols.len()), (10, 9));
        for (i, (label, cx, cy)) in rows.iter().enumerate() {
            assert_eq!(label, &m.row_labels[i]);
            let (x, y) = map.back(*cx, *cy);
            assert!((x - m.a[(i, 0)]).abs() <= tol && (y - m.a[(i, 2)]).abs() <= tol);
        }
        for (j, (_, cx, cy)) in cols.iter().enumerate() {
            let (x, y) = map.back(*cx, *cy);
            assert!((x - m.b[(j, 0)]).abs() <= tol && (y - m.b[(j, 2)]).abs() <= tol);
        }
        let titles: Vec<&str> = doc.descendants().filter(|n| n.attribute("class") == Some("axis-title")).filter_map(|n| n.text()).collect();
        assert!(titles.iter().any(|t| t.starts_with("Dimension 1: λ = ")));
        assert!(titles.iter().any(|t| t.starts_with("Dimension 3: λ = ")));
    }

    #[test]
    fn nonzero_filter_drops_all_zero_items() {
        let t = table(12, 10, 2);
        let m = fit_sparse_ca(
            &t,
            &[SparsityConstraint::Coupled { sumabs: 0.45 }, SparsityConstraint::Coupled { sumabs: 0.5 }],
            Variant::DoublySparse,
            &SparseCaOptions::default(),
        )
        .unwrap();
        let spec = PlotSpec { filter: LabelFilter::NonzeroOnly, ..PlotSpec::new(PlotKind::SymmetricMap) };
        let svg = render_svg(PlotInput::Model((&m).into()), &spec).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let (u, v) = (m.row_weights(), m.col_weights());
        let kept_rows = (0..12).filter(|&i| u[(i, 0)] != 0.0 || u[(i, 1)] != 0.0).count();
        let kept_cols = (0..10).filter(|&j| v[(j, 0)] != 0.0 || v[(j, 1)] != 0.0).count();
        assert!(kept_rows < 12 || kept_cols < 10);
        assert_eq!(points(&doc, "row").len(), kept_rows);
        assert_eq!(points(&doc, "col").len(), kept_cols);
        // coordinates, not weights, are drawn
        let map = mapping(&doc);
        let (label, cx, _) = &points(&doc, "row")[0];
        let i = m.row_labels.iter().position(|l| l == label).unwrap();
        assert!((map.back(*cx, 0.0).0 - m.a[(i, 0)]).abs() < 1e-5);
    }

    #[test]
    fn dimension_out_of_range() {
        let m = fit_ca(&table(5, 4, 3), 2).unwrap();
        let spec = PlotSpec { dims: (0, 2), ..PlotSpec::new(PlotKind::SymmetricMap) };
        let e = render_svg(PlotInput::Model((&m).into()), &spec).unwrap_err();
        assert!(matches!(e, Error::InvalidInput(_)));
        assert!(render_svg(PlotInput::Model((&m).into()), &PlotSpec::new(PlotKind::Contour)).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let m = fit_ca(&table(8, 6, 4), 2).unwrap();
        let spec = PlotSpec::new(PlotKind::SymmetricMap);
        let a = render_svg(PlotInput::Model((&m).into()), &spec).unwrap();
        let b = render_svg(PlotInput::Model((&m).into()), &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singleton_path_is_one_column() {
        let m = fit_ca(&table(6, 7, 5), 1).unwrap();
        let p = weight_paths(&m.z, &[0.6], GridParam::Coupled, Variant::DoublySparse, &Default::default()).unwrap();
        let svg = render_svg(PlotInput::Paths { path: &p, labels: &m.col_labels }, &PlotSpec::new(PlotKind::WeightPath)).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let pts = points(&doc, "point");
        assert_eq!(pts.len(), 7);
        assert!(pts.iter().all(|p| (p.1 - pts[0].1).abs() < 1e-9));
        assert_eq!(doc.descendants().filter(|n| n.tag_name().name() == "polyline").count(), 0);
    }

    #[test]
    fn tuning_and_tree_charts_parse() {
        let m = fit_ca(&table(8, 7, 6), 2).unwrap();
        let setup = TuningSetup::new(Variant::DoublySparse, Criterion::Is);
        let one = grid_search(&m.z, &GridSpec::OneD { values: vec![0.5, 0.6, 0.7, 0.8, 1.0], param: GridParam::Coupled }, &setup).unwrap();
        let two = grid_search(&m.z, &GridSpec::TwoD { sumabsu: vec![1.2, 1.6, 2.0, 2.8], sumabsv: vec![1.1, 1.5, 2.0, 2.6] }, &setup).unwrap();
        let curve = render_svg(PlotInput::Tuning(&one), &PlotSpec::new(PlotKind::CriterionCurve)).unwrap();
        let doc = roxmltree::Document::parse(&curve).unwrap();
        let map = mapping(&doc);
        let opt = doc.descendants().find(|n| n.attribute("class") == Some("optimum")).unwrap();
        let (x, y) = map.back(opt.attribute("cx").unwrap().parse().unwrap(), opt.attribute("cy").unwrap().parse().unwrap());
        assert!((x - one.optimum.0).abs() < 1e-5 && (y - one.optimum_value).abs() < 1e-5);
        let cont = render_svg(PlotInput::Tuning(&two), &PlotSpec::new(PlotKind::Contour)).unwrap();
        let doc = roxmltree::Document::parse(&cont).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("cell")).count(), 16);
        assert!(render_svg(PlotInput::Tuning(&two), &PlotSpec::new(PlotKind::CriterionCurve)).is_err());

        let d = ward_cluster(&m.a, &m.row_labels, WardVariant::D2).unwrap();
        let tree = render_svg(PlotInput::Dendrogram(&d), &PlotSpec::new(PlotKind::Dendrogram)).unwrap();
        let doc = roxmltree::Document::parse(&tree).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("link")).count(), 7);
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("leaf")).count(), 8);

        let scree = render_svg(PlotInput::Model((&m).into()), &PlotSpec::new(PlotKind::Scree)).unwrap();
        let doc = roxmltree::Document::parse(&scree).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("bar")).count(), m.eigenvalues.len());

        let assignment = crate::analysis::cut_tree(&d, 3).unwrap();
        let map = render_svg(
            PlotInput::Clusters { model: (&m).into(), assignment: &assignment, typicality: None },
            &PlotSpec::new(PlotKind::ClusterMap),
        )
        .unwrap();
        roxmltree::Document::parse(&map).unwrap();
        assert!(map.contains("Cluster 3"));
    }

    #[test]
    fn iso_lines_cross_the_level() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 1.0];
        let value = |i: usize, _j: usize| i as f64;
        let segs = iso_segments(&xs, &ys, &value, 0.5);
        assert_eq!(segs.len(), 1);
        assert!((segs[0].0 .0 - 0.5).abs() < 1e-12 && (segs[0].1 .0 - 0.5).abs() < 1e-12);
    }
}
