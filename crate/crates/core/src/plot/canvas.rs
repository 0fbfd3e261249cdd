use std::fmt::Write;

use crate::io::format_sig;

pub(crate) const WIDTH: f64 = 720.0;
pub(crate) const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 40.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const FONT: f64 = 11.0;
const CHAR_WIDTH: f64 = 6.2;

pub(crate) const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Linear map from data to pixels over the plotting area.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Frame {
        Frame {
            left: MARGIN_LEFT,
            top: MARGIN_TOP,
            width: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            height: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            x: widen(x),
            y: widen(y),
        }
    }

    /// Same units per pixel on both axes, each range centred on its data.
    pub fn equal_aspect(x: (f64, f64), y: (f64, f64)) -> Frame {
        let mut f = Frame::new(x, y);
        let per_px = ((f.x.1 - f.x.0) / f.width).max((f.y.1 - f.y.0) / f.height);
        let grow = |r: (f64, f64), px: f64| {
            let mid = 0.5 * (r.0 + r.1);
            (mid - 0.5 * per_px * px, mid + 0.5 * per_px * px)
        };
        f.x = grow(f.x, f.width);
        f.y = grow(f.y, f.height);
        f
    }

    pub fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        self.top + (self.y.1 - y) / (self.y.1 - self.y.0) * self.height
    }
}

/// Data range with 8% padding; a point range becomes a unit interval.
pub(crate) fn padded(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.into_iter().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = 0.08 * (hi - lo);
    (lo - pad, hi + pad)
}

fn widen(r: (f64, f64)) -> (f64, f64) {
    if r.1 - r.0 > 1e-12 * (r.0.abs() + r.1.abs()).max(1e-300) {
        r
    } else {
        (r.0 - 0.5, r.1 + 0.5)
    }
}

fn ticks(r: (f64, f64)) -> Vec<f64> {
    let raw = (r.1 - r.0) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (r.0 / step).ceil() as i64;
    let last = (r.1 / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }
}

/// SVG document under construction.
pub(crate) struct Svg {
    buf: String,
    labels: Vec<Rect>,
}

impl Svg {
    pub fn new(title: &str) -> Svg {
        let mut buf = String::new();
        let _ = writeln!(buf, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="{FONT}">"#
        );
        let _ = writeln!(buf, "<title>{}</title>", escape(title));
        let _ = writeln!(buf, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);
        let _ = writeln!(
            buf,
            r#"<text x="{:.3}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Svg { buf, labels: Vec::new() }
    }

    pub fn raw(&mut self, s: &str) {
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    /// Opens the plotting group; its attributes carry the data-to-pixel map.
    pub fn begin_plot(&mut self, f: &Frame) {
        let _ = writeln!(
            self.buf,
            r#"<g class="plot-area" data-left="{}" data-top="{}" data-width="{}" data-height="{}" data-xmin="{}" data-xmax="{}" data-ymin="{}" data-ymax="{}">"#,
            f.left, f.top, f.width, f.height, f.x.0, f.x.1, f.y.0, f.y.1
        );
        let _ = writeln!(
            self.buf,
            r##"<rect class="frame" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#999999"/>"##,
            f.left, f.top, f.width, f.height
        );
    }

    pub fn end_plot(&mut self) {
        self.buf.push_str("</g>\n");
    }

    pub fn axes(&mut self, f: &Frame, xlabel: &str, ylabel: &str, origin_lines: bool) {
        let bottom = f.top + f.height;
        for t in ticks(f.x) {
            let x = f.px(t);
            self.line(x, bottom, x, bottom + 5.0, "tick", "#666666", false);
            self.text(x, bottom + 17.0, &format_sig(round_tick(t)), "middle", "tick-label");
        }
        for t in ticks(f.y) {
            let y = f.py(t);
            self.line(f.left - 5.0, y, f.left, y, "tick", "#666666", false);
            self.text(f.left - 8.0, y + 4.0, &format_sig(round_tick(t)), "end", "tick-label");
        }
        if origin_lines {
            if f.x.0 < 0.0 && f.x.1 > 0.0 {
                self.line(f.px(0.0), f.top, f.px(0.0), bottom, "axis", "#444444", true);
            }
            if f.y.0 < 0.0 && f.y.1 > 0.0 {
                self.line(f.left, f.py(0.0), f.left + f.width, f.py(0.0), "axis", "#444444", true);
            }
        }
        self.text(f.left + f.width / 2.0, bottom + 40.0, xlabel, "middle", "axis-title");
        let (x, y) = (22.0, f.top + f.height / 2.0);
        let _ = writeln!(
            self.buf,
            r#"<text class="axis-title" x="{x}" y="{y:.3}" text-anchor="middle" transform="rotate(-90 {x} {y:.3})">{}</text>"#,
            escape(ylabel)
        );
    }

    #[allow(clippy::too_many_arguments)]
    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, class: &str, stroke: &str, dashed: bool) {
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.buf,
            r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}"{dash}/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], class: &str, label: &str, stroke: &str) {
        let mut p = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            if i > 0 {
                p.push(' ');
            }
            let _ = write!(p, "{x:.3},{y:.3}");
        }
        let _ = writeln!(
            self.buf,
            r#"<polyline class="{class}" data-label="{}" points="{p}" fill="none" stroke="{stroke}"/>"#,
            escape(label)
        );
    }

    pub fn point(&mut self, x: f64, y: f64, class: &str, label: &str, fill: &str) {
        let _ = writeln!(
            self.buf,
            r#"<circle class="{class}" data-label="{}" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{fill}"/>"#,
            escape(label)
        );
    }

    pub fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, class: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text class="{class}" x="{x:.3}" y="{y:.3}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    /// Places a label near `(x, y)` at the first offset that does not collide
    /// with labels placed so far.
    pub fn label(&mut self, x: f64, y: f64, s: &str, fill: &str) {
        let w = CHAR_WIDTH * s.chars().count() as f64;
        let h = FONT + 1.0;
        let mut chosen = None;
        'search: for scale in [1.0, 2.0, 3.0] {
            for (dx, dy) in [(6.0, -4.0), (6.0, 12.0), (-6.0 - w, -4.0), (-6.0 - w, 12.0), (-w / 2.0, -8.0), (-w / 2.0, 18.0)] {
                let (bx, by) = (x + dx * scale, y + dy * scale);
                let r = Rect { x0: bx, y0: by - h + 2.0, x1: bx + w, y1: by + 2.0 };
                let inside = r.x0 >= 0.0 && r.x1 <= WIDTH && r.y0 >= 0.0 && r.y1 <= HEIGHT;
                if inside && !self.labels.iter().any(|o| o.overlaps(&r)) {
                    chosen = Some((bx, by, r));
                    break 'search;
                }
            }
        }
        let (bx, by, r) = chosen.unwrap_or_else(|| {
            let (bx, by) = (x + 6.0, y - 4.0);
            (bx, by, Rect { x0: bx, y0: by - h + 2.0, x1: bx + w, y1: by + 2.0 })
        });
        self.labels.push(r);
        let _ = writeln!(
            self.buf,
            r#"<text class="label" x="{bx:.3}" y="{by:.3}" fill="{fill}">{}</text>"#,
            escape(s)
        );
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

fn round_tick(t: f64) -> f64 {
    if t.abs() < 1e-12 {
        0.0
    } else {
        t
    }
}
