//! Self-contained SVG line charts for forecast inspection.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 44.0;

struct Viewport {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Viewport {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN_LEFT + (v - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn polyline(view: &Viewport, points: &[(f64, f64)], color: &str, dashed: bool) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", view.x(*x), view.y(*y)))
        .collect();
    let dash = if dashed {
        " stroke-dasharray=\"6 3\""
    } else {
        ""
    };
    format!(
        "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Write an SVG chart of history, actual future, and predicted future,
/// plus a sidecar CSV (`same path, .csv extension`) holding the plotted
/// vectors in long `t,series,value` form.
pub fn emit_plot(
    history: &[f64],
    actual: &[f64],
    predicted: &[f64],
    predicted_name: &str,
    title: &str,
    path: &Path,
) -> Result<()> {
    if actual.is_empty() || predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }

    let h = history.len();
    let m = actual.len();
    let all = history.iter().chain(actual).chain(predicted);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in all {
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let view = Viewport {
        x_min: 0.0,
        x_max: (h + m - 1).max(1) as f64,
        y_min,
        y_max,
    };

    let series_points = |offset: usize, values: &[f64]| -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| ((offset + i) as f64, v))
            .collect();
        // visually connect the future to the last history point
        if offset > 0 {
            pts.insert(0, ((offset - 1) as f64, history[offset - 1]));
        }
        pts
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape_xml(title)
    );

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let yv = y_min + frac * (y_max - y_min);
        let yp = view.y(yv);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{yp:.2}\" x2=\"{x0}\" y2=\"{yp:.2}\" stroke=\"black\"/>",
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{yv:.3}</text>",
            x0 - 7.0,
            yp + 4.0
        );
        let xv = view.x_min + frac * (view.x_max - view.x_min);
        let xp = view.x(xv);
        let _ = writeln!(
            svg,
            "  <line x1=\"{xp:.2}\" y1=\"{y0}\" x2=\"{xp:.2}\" y2=\"{:.1}\" stroke=\"black\"/>",
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{xp:.2}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{xv:.0}</text>",
            y0 + 18.0
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">t</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 8.0
    );

    if !history.is_empty() {
        svg.push_str(&polyline(&view, &series_points(0, history), "#1f77b4", false));
    }
    svg.push_str(&polyline(&view, &series_points(h, actual), "#2ca02c", false));
    svg.push_str(&polyline(&view, &series_points(h, predicted), "#d62728", true));

    // legend
    let entries = [
        ("history", "#1f77b4"),
        ("actual", "#2ca02c"),
        (predicted_name, "#d62728"),
    ];
    for (i, (label, color)) in entries.iter().enumerate() {
        let ly = MARGIN_TOP + 16.0 * i as f64 + 8.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            x0 + 10.0,
            x0 + 34.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            x0 + 40.0,
            ly + 4.0,
            escape_xml(label)
        );
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;

    // sidecar CSV of the plotted values
    let mut csv = String::from("t,series,value\n");
    for (t, v) in history.iter().enumerate() {
        let _ = writeln!(csv, "{t},history,{v}");
    }
    for (i, v) in actual.iter().enumerate() {
        let _ = writeln!(csv, "{},actual,{v}", h + i);
    }
    for (i, v) in predicted.iter().enumerate() {
        let _ = writeln!(csv, "{},predicted,{v}", h + i);
    }
    std::fs::write(path.with_extension("csv"), csv)?;
    Ok(())
}
