//! Self-contained SVG line plots and histograms.
//!
//! Output depends only on the input numbers (fixed canvas, fixed palette,
//! coordinates printed to two decimals), so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A labelled sequence of points.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Every series drawn as a polyline.
    Line,
    /// The first series' x values are binned into a density histogram;
    /// the remaining series are overlaid as polylines.
    Histogram { bins: usize },
}

/// Axis labels and title.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Labels {
    pub title: String,
    pub x: String,
    pub y: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    }
}

fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = span(lo, hi);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c as f64 / (n * width)))
        .collect()
}

/// Render the plot as an SVG document.
pub fn render_svg(series: &[Series], kind: PlotKind, labels: &Labels) -> Result<String> {
    let clean: Vec<Series> = series
        .iter()
        .map(|s| {
            Series::new(
                s.label.clone(),
                s.points.iter().cloned().filter(|(x, y)| x.is_finite() && y.is_finite()).collect(),
            )
        })
        .collect();
    if clean.is_empty() || clean.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Domain("nothing to plot".into()));
    }
    let bars = match kind {
        PlotKind::Histogram { bins } => {
            if bins == 0 || clean[0].points.is_empty() {
                return Err(Error::Domain("histogram needs bins and samples".into()));
            }
            let xs: Vec<f64> = clean[0].points.iter().map(|p| p.0).collect();
            histogram(&xs, bins)
        }
        PlotKind::Line => Vec::new(),
    };
    let lines: &[Series] = match kind {
        PlotKind::Line => &clean,
        PlotKind::Histogram { .. } => &clean[1..],
    };

    let mut xlo = f64::INFINITY;
    let mut xhi = f64::NEG_INFINITY;
    let mut ylo = f64::INFINITY;
    let mut yhi = f64::NEG_INFINITY;
    for &(a, b, h) in &bars {
        xlo = xlo.min(a);
        xhi = xhi.max(b);
        ylo = ylo.min(0.0);
        yhi = yhi.max(h);
    }
    for s in lines {
        for &(x, y) in &s.points {
            xlo = xlo.min(x);
            xhi = xhi.max(x);
            ylo = ylo.min(y);
            yhi = yhi.max(y);
        }
    }
    let (xlo, xhi) = span(xlo, xhi);
    let (ylo, yhi) = span(ylo, yhi);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * pw;
    let py = |y: f64| TOP + (yhi - y) / (yhi - ylo) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&labels.title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (xlo + f * (xhi - xlo), ylo + f * (yhi - ylo));
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(xv),
            TOP + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(&labels.x)
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&labels.y)
    );
    for &(a, b, h) in &bars {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#6baed6"/>"##,
            px(a),
            py(h),
            px(b) - px(a),
            py(0.0) - py(h)
        );
    }
    let mut legend = 0;
    if !bars.is_empty() {
        legend_entry(&mut svg, legend, "#9ecae1", &clean[0].label);
        legend += 1;
    }
    for (i, s) in lines.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        legend_entry(&mut svg, legend, colour, &s.label);
        legend += 1;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn legend_entry(svg: &mut String, row: usize, colour: &str, label: &str) {
    let y = TOP + 14.0 + row as f64 * 16.0;
    let x = WIDTH - RIGHT - 150.0;
    let _ = writeln!(
        svg,
        r#"<rect x="{x:.2}" y="{:.2}" width="12" height="4" fill="{colour}"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
        y - 6.0,
        x + 18.0,
        escape(label)
    );
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Render and write the plot to `path`.
pub fn emit_plot(series: &[Series], kind: PlotKind, labels: &Labels, path: &Path) -> Result<()> {
    let svg = render_svg(series, kind, labels)?;
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
