//! Static SVG scatter plots of clustered points.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 140.0;

/// Fill color for a cluster label; labels cycle through the palette and
/// label 0 (noise) is drawn in black.
pub fn color_for(label: usize) -> &'static str {
    if label == 0 {
        "#000000"
    } else {
        PALETTE[(label - 1) % PALETTE.len()]
    }
}

/// Renders the scatter as an SVG document. One `circle` element per point,
/// an axes box, and one legend entry per distinct label with its size.
pub fn svg_scatter(points: &[[f64; 2]], labels: &[usize]) -> Result<String> {
    if points.len() != labels.len() {
        return Err(Error::LabelLength {
            expected: points.len(),
            got: labels.len(),
        });
    }
    if let Some(i) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::InvalidCell {
            row: i,
            col: if points[i][0].is_finite() { 1 } else { 0 },
            reason: "plot coordinates must be finite".into(),
        });
    }

    let bounds = |c: usize| {
        let lo = points.iter().map(|p| p[c]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[c]).fold(f64::NEG_INFINITY, f64::max);
        if points.is_empty() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = bounds(0);
    let (y0, y1) = bounds(1);
    let plot_w = WIDTH - 2.0 * MARGIN - LEGEND_WIDTH;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (tick, x) in [(x0, MARGIN), (x1, MARGIN + plot_w)] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{tick:.3}</text>"#,
            HEIGHT - MARGIN + 14.0
        );
    }
    for (tick, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" font-size="10" text-anchor="end">{tick:.3}</text>"#,
            MARGIN - 4.0
        );
    }
    for (p, &l) in points.iter().zip(labels) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            sx(p[0]),
            sy(p[1]),
            color_for(l)
        );
    }

    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let lx = WIDTH - LEGEND_WIDTH - MARGIN / 2.0;
    for (row, &l) in distinct.iter().enumerate() {
        let size = labels.iter().filter(|&&x| x == l).count();
        let y = MARGIN + 10.0 + 18.0 * row as f64;
        let name = if l == 0 {
            "noise".to_string()
        } else {
            format!("cluster {l}")
        };
        let _ = writeln!(
            out,
            r#"<g class="legend"><rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{y:.2}" font-size="12">{name} (n = {size})</text></g>"#,
            y - 9.0,
            color_for(l),
            lx + 16.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_svg_scatter(
    points: &[[f64; 2]],
    labels: &[usize],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, svg_scatter(points, labels)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<[f64; 2]>, Vec<usize>) {
        let pts: Vec<[f64; 2]> = (0..30).map(|i| [i as f64, (i * i % 7) as f64]).collect();
        let labels = (0..30).map(|i| i % 14 + 1).collect();
        (pts, labels)
    }

    #[test]
    fn one_circle_per_point_and_legend_per_cluster() {
        let (pts, labels) = sample();
        let svg = svg_scatter(&pts, &labels).unwrap();
        assert_eq!(svg.matches("<circle").count(), 30);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 14);
        // label 13 wraps to the first color
        assert!(svg.contains("cluster 13 (n = 2)"));
        assert_eq!(color_for(13), PALETTE[0]);
    }

    #[test]
    fn deterministic_bytes() {
        let (pts, labels) = sample();
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        render_svg_scatter(&pts, &labels, &a).unwrap();
        render_svg_scatter(&pts, &labels, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(svg_scatter(&[[f64::NAN, 0.0]], &[1]).is_err());
        assert!(svg_scatter(&[[0.0, 0.0]], &[]).is_err());
        assert!(render_svg_scatter(&[[0.0, 0.0]], &[1], "/nonexistent-dir/p.svg").is_err());
    }

    #[test]
    fn constant_coordinates_are_drawn() {
        let svg = svg_scatter(&[[1.0, 1.0], [1.0, 1.0]], &[1, 1]).unwrap();
        assert!(!svg.contains("NaN"));
    }
}
