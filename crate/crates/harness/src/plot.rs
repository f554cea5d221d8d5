//! Objective gap against essential operations, drawn as plain SVG from the stored CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use adgd_core::problem::EssentialMetric;

use crate::error::{HarnessError, Result};
use crate::experiment::{problem_dir, Manifest};
use crate::trace_csv;

const PALETTE: [&str; 10] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e",
];
const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 180.0, 40.0, 55.0); // left, right, top, bottom
const MAX_POINTS: usize = 1500;

/// One curve: `(essential operations, objective gap)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Renders `series` with a log-scale gap axis; gaps are floored at `floor`.
pub fn render_svg(title: &str, x_label: &str, series: &[Series], floor: f64) -> String {
    let (l, r, t, b) = MARGIN;
    let (pw, ph) = (WIDTH - l - r, HEIGHT - t - b);
    let pts = series.iter().flat_map(|s| s.points.iter());
    let x_max = pts.clone().map(|p| p.0).fold(1.0f64, f64::max);
    let gaps: Vec<f64> = pts.map(|p| p.1.max(floor)).filter(|g| g.is_finite()).collect();
    let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (d_lo, mut d_hi) = if lo.is_finite() {
        (lo.log10().floor(), hi.log10().ceil())
    } else {
        (-1.0, 0.0)
    };
    if d_hi <= d_lo {
        d_hi = d_lo + 1.0;
    }
    let sx = |x: f64| l + pw * x / x_max;
    let sy = |g: f64| t + ph * (d_hi - g.max(floor).log10()) / (d_hi - d_lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" font-size="15">{}</text>"#, l, escape(title));
    let step = ((d_hi - d_lo) / 8.0).ceil().max(1.0);
    let mut d = d_lo;
    while d <= d_hi {
        let y = sy(10f64.powf(d));
        let _ = writeln!(
            s,
            r##"<line x1="{l}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            l + pw,
            l - 6.0,
            y + 4.0
        );
        d += step;
    }
    for i in 0..=5 {
        let v = x_max * i as f64 / 5.0;
        let x = sx(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{t}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            t + ph,
            t + ph + 16.0,
            v.round()
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        l + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">F - F_ref</text>"#,
        t + ph / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let width = if i == 0 { 2.5 } else { 1.2 };
        let stride = ser.points.len().div_ceil(MAX_POINTS).max(1);
        let path: Vec<String> = ser
            .points
            .iter()
            .enumerate()
            .filter(|(k, _)| k % stride == 0 || *k + 1 == ser.points.len())
            .filter(|(_, p)| p.1.is_finite())
            .map(|(_, p)| format!("{:.1},{:.1}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
            path.join(" ")
        );
        let ly = t + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="{width}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            l + pw + 12.0,
            l + pw + 36.0,
            l + pw + 42.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Curve of one stored trace: starts at `(0, F(x^1) - f_ref)`.
pub fn series_from_csv(path: &Path, label: &str, metric: EssentialMetric, f_ref: f64) -> Result<Series> {
    let rows = trace_csv::read_csv(path)?;
    Ok(Series {
        label: label.into(),
        points: rows
            .iter()
            .map(|r| (r.counters.essential(metric) as f64, r.f_value - f_ref))
            .collect(),
    })
}

/// One `gap.svg` per problem in the manifest; reads only the CSVs.
pub fn plot_experiment(out: &Path, manifest: &Manifest) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for p in &manifest.problems {
        let cells: Vec<_> = manifest.cells.iter().filter(|c| c.problem == p.slug).collect();
        let mut series = Vec::new();
        let mut f_min = f64::INFINITY;
        for c in &cells {
            let rows = trace_csv::read_csv(&out.join(&c.csv))?;
            f_min = rows.iter().map(|r| r.f_value).fold(f_min, f64::min);
        }
        let f_ref = p.reference.as_ref().map_or(f_min, |r| r.reference.f_star.min(f_min));
        for c in &cells {
            series.push(series_from_csv(&out.join(&c.csv), &c.rule, p.metric, f_ref)?);
        }
        let floor = 1e-16 * (1.0 + f_ref.abs());
        let svg = render_svg(&p.slug, &p.metric.describe(), &series, floor);
        let path = problem_dir(out, &p.slug).join("gap.svg");
        std::fs::write(&path, svg).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_has_one_polyline_per_series() {
        let series = vec![
            Series {
                label: "a".into(),
                points: vec![(0.0, 1.0), (1.0, 1e-3), (2.0, 0.0)],
            },
            Series {
                label: "b<c>".into(),
                points: vec![(0.0, 2.0), (3.0, 1e-1)],
            },
        ];
        let svg = render_svg("t", "projections", &series, 1e-12);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b&lt;c&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_input_still_renders() {
        let svg = render_svg("t", "x", &[], 1e-16);
        assert!(svg.contains("<svg"));
    }
}
