//! Minimal deterministic SVG plots: log-log scaling plots and linear
//! overlays. Same input always produces byte-identical output; numbers
//! are formatted with fixed precision and no timestamps or ids are
//! embedded.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Both axes log10-scaled; all values must be positive.
    LogLog,
    /// Linear axes; used for ESD-vs-reference overlays.
    Overlay,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw a connecting polyline in addition to the markers.
    pub line: bool,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.to_string(),
            points,
            line: true,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

/// Renders the plot to an SVG string.
pub fn render_plot(series: &[Series], kind: PlotKind) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Argument("plot needs at least one data point".into()));
    }
    let transform = |x: f64, y: f64| -> Result<(f64, f64)> {
        match kind {
            PlotKind::LogLog => {
                if !(x > 0.0 && y > 0.0) {
                    return Err(Error::Argument(format!(
                        "log-log plot requires positive values, got ({x}, {y})"
                    )));
                }
                Ok((x.log10(), y.log10()))
            }
            PlotKind::Overlay => Ok((x, y)),
        }
    };

    let mut txs: Vec<Vec<(f64, f64)>> = Vec::with_capacity(series.len());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        let mut pts = Vec::with_capacity(s.points.len());
        for &(x, y) in &s.points {
            let (tx, ty) = transform(x, y)?;
            x_min = x_min.min(tx);
            x_max = x_max.max(tx);
            y_min = y_min.min(ty);
            y_max = y_max.max(ty);
            pts.push((tx, ty));
        }
        txs.push(pts);
    }
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x_max - x_min);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y_max - y_min);
    let px = |x: f64| MARGIN + (x - x_min) * sx;
    let py = |y: f64| HEIGHT - MARGIN - (y - y_min) * sy;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN),
        fmt(WIDTH - MARGIN),
        fmt(HEIGHT - MARGIN)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN)
    ));
    // Corner tick labels in data (possibly log10) coordinates.
    let prefix = match kind {
        PlotKind::LogLog => "log10 ",
        PlotKind::Overlay => "",
    };
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">{prefix}x: [{}, {}]</text>\n",
        fmt(MARGIN),
        fmt(HEIGHT - MARGIN + 28.0),
        fmt(x_min),
        fmt(x_max)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">{prefix}y: [{}, {}]</text>\n",
        fmt(4.0),
        fmt(MARGIN - 8.0),
        fmt(y_min),
        fmt(y_max)
    ));

    for (si, (s, pts)) in series.iter().zip(&txs).enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        if s.line && pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{},{}", fmt(px(x)), fmt(py(y))))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                path.join(" ")
            ));
        }
        for &(x, y) in pts {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                fmt(px(x)),
                fmt(py(y))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            fmt(WIDTH - MARGIN - 160.0),
            fmt(MARGIN + 16.0 * si as f64),
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders and writes the plot file.
pub fn emit_plot(series: &[Series], kind: PlotKind, path: &Path) -> Result<()> {
    let svg = render_plot(series, kind)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_series_is_valid() {
        let s = [Series::new("one", vec![(1.0, 2.0)])];
        let svg = render_plot(&s, PlotKind::Overlay).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn deterministic_output() {
        let s = [
            Series::new("a", vec![(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]),
            Series::new("b", vec![(1.0, 2.0), (2.0, 2.0)]),
        ];
        let one = render_plot(&s, PlotKind::LogLog).unwrap();
        let two = render_plot(&s, PlotKind::LogLog).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn loglog_rejects_nonpositive() {
        let s = [Series::new("bad", vec![(1.0, 0.0)])];
        assert!(render_plot(&s, PlotKind::LogLog).is_err());
        assert!(render_plot(&s, PlotKind::Overlay).is_ok());
        assert!(render_plot(&[], PlotKind::Overlay).is_err());
    }

    #[test]
    fn emit_writes_file() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("wignerlab-plot-{}.svg", std::process::id()));
        let s = [Series::new("x&y", vec![(1.0, 1.0), (2.0, 4.0)])];
        emit_plot(&s, PlotKind::LogLog, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("x&amp;y"));
        let _ = fs::remove_file(&path);
    }
}
