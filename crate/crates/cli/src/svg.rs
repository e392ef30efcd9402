//! Standalone SVG line plots.
//!
//! The renderer is deliberately small: fixed canvas, nice-number ticks,
//! one polyline per series, a legend keyed by series name. Everything is
//! formatted with fixed precision so the same data always produces the
//! same bytes.

use std::fmt::Write as _;

use realclock::Result;

use crate::config::config_err;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Tick positions covering [lo, hi] at a 1/2/5 times power-of-ten spacing.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw_step = span / 5.0;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    } * mag;
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        // Snap near-zero ticks so -0.0 never appears in labels.
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    ticks
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e6).contains(&a) {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `series` against `x` as a standalone SVG document.
///
/// Requires at least one series, equal lengths throughout, and finite
/// values; a NaN is reported with its series name and index.
pub fn emit_svg(title: &str, x_label: &str, x: &[f64], series: &[(String, Vec<f64>)]) -> Result<String> {
    if series.is_empty() {
        return Err(config_err("svg needs at least one series"));
    }
    if x.is_empty() {
        return Err(config_err("svg needs a non-empty grid"));
    }
    for (name, values) in series {
        if values.len() != x.len() {
            return Err(config_err(format!(
                "svg series {name} has {} values for {} grid points",
                values.len(),
                x.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(config_err(format!(
                    "svg series {name} has a non-finite value at index {i}"
                )));
            }
        }
    }
    for (i, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(config_err(format!(
                "svg grid has a non-finite value at index {i}"
            )));
        }
    }

    let (x_lo, x_hi) = bounds(std::iter::once(x));
    let (mut y_lo, mut y_hi) = bounds(series.iter().map(|(_, v)| v.as_slice()));
    if y_hi - y_lo < 1e-300 {
        // Flat data still deserves a visible axis range.
        let pad = if y_lo.abs() > 0.0 { y_lo.abs() * 0.1 } else { 0.5 };
        y_lo -= pad;
        y_hi += pad;
    }
    let x_span = (x_hi - x_lo).max(f64::MIN_POSITIVE);
    let y_span = y_hi - y_lo;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |v: f64| MARGIN_LEFT + (v - x_lo) / x_span * plot_w;
    let py = |v: f64| MARGIN_TOP + (1.0 - (v - y_lo) / y_span) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    for tick in nice_ticks(x_lo, x_hi) {
        let gx = px(tick);
        let _ = writeln!(
            out,
            r##"<line x1="{gx:.2}" y1="{:.2}" x2="{gx:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            out,
            r#"<text x="{gx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h + 18.0,
            tick_label(tick)
        );
    }
    for tick in nice_ticks(y_lo, y_hi) {
        let gy = py(tick);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{gy:.2}" x2="{:.2}" y2="{gy:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            gy + 4.0,
            tick_label(tick)
        );
    }

    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );

    for (idx, (name, values)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for (&xv, &yv) in x.iter().zip(values) {
            let _ = write!(points, "{:.2},{:.2} ", px(xv), py(yv));
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.trim_end()
        );
        let ly = MARGIN_TOP + 14.0 + idx as f64 * 18.0;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 26.0,
            escape(name)
        );
    }

    out.push_str("</svg>\n");
    Ok(out)
}

fn bounds<'a>(sets: impl Iterator<Item = &'a [f64]>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for set in sets {
        for &v in set {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}
