use std::fmt::Write;

use crate::model::ObservationSeries;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const LEGEND: f64 = 150.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (mut y0, mut y1) = bounds(ys);
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        Self {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN - LEGEND)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, frame: &Frame, title: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (WIDTH - LEGEND) / 2.0,
        escape(title)
    );
    let (left, right) = (MARGIN, WIDTH - MARGIN - LEGEND);
    let (top, bottom) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = frame.x0 + f * (frame.x1 - frame.x0);
        let yv = frame.y0 + f * (frame.y1 - frame.y0);
        let (xp, yp) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(
            out,
            r#"<text x="{xp:.2}" y="{}" text-anchor="middle">{xv:.3}</text>"#,
            bottom + 16.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{yp:.2}" text-anchor="end" dominant-baseline="middle">{yv:.3}</text>"#,
            left - 6.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">time</text>"#,
        (left + right) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, labels: &[String]) {
    let x = WIDTH - LEGEND + 8.0;
    for (k, label) in labels.iter().enumerate() {
        let y = MARGIN + 18.0 * k as f64;
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="12" height="4" fill="{color}"/>"#,
            y - 2.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" dominant-baseline="middle">{}</text>"#,
            x + 18.0,
            escape(label)
        );
    }
}

fn polyline(out: &mut String, frame: &Frame, points: impl Iterator<Item = (f64, f64)>, color: &str, label: &str) {
    let coords: Vec<String> = points
        .map(|(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline data-species="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
        escape(label),
        coords.join(" ")
    );
}

/// Proportion against time, one polyline per species.
pub fn render_series_svg(series: &ObservationSeries) -> String {
    let n = series.n_species();
    let t = series.times();
    let frame = Frame::new(
        t.iter().copied(),
        (0..series.n_obs()).flat_map(|i| series.x(i).to_vec()),
    );
    let mut out = String::new();
    header(&mut out, &frame, "Proportions", "proportion");
    for k in 0..n {
        let pts = (0..series.n_obs()).map(|i| (t[i], series.x(i)[k]));
        polyline(&mut out, &frame, pts, PALETTE[k % PALETTE.len()], &series.labels()[k]);
    }
    legend(&mut out, series.labels());
    out.push_str("</svg>\n");
    out
}

/// Observed log-proportions as markers with one-step predictions
/// (`predictions[j]` is the forecast for observation `j + 1`) as one
/// polyline per species.
pub fn render_predictions_svg(series: &ObservationSeries, predictions: &[Vec<f64>]) -> String {
    let n = series.n_species();
    let t = series.times();
    let ys = (0..series.n_obs())
        .flat_map(|i| series.u(i).to_vec())
        .chain(predictions.iter().flatten().copied());
    let frame = Frame::new(t.iter().copied(), ys);
    let mut out = String::new();
    header(
        &mut out,
        &frame,
        "Log-proportions and one-step predictions",
        "log proportion",
    );
    for k in 0..n {
        let color = PALETTE[k % PALETTE.len()];
        for i in 0..series.n_obs() {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="none" stroke="{color}"/>"#,
                frame.px(t[i]),
                frame.py(series.u(i)[k])
            );
        }
        let pts = predictions.iter().enumerate().map(|(j, p)| (t[j + 1], p[k]));
        polyline(&mut out, &frame, pts, color, &series.labels()[k]);
    }
    legend(&mut out, series.labels());
    out.push_str("</svg>\n");
    out
}
