//! Bare-bones SVG line plots of magnitude and phase against frequency.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const PANEL: f64 = 220.0;
const MARGIN: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One curve: a label and `(x, magnitude, phase)` samples. Non-finite
/// samples break the polyline.
pub struct Trace {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn panel(out: &mut String, traces: &[Trace], top: f64, title: &str, pick: impl Fn(&(f64, f64, f64)) -> f64) {
    let (x0, x1) = bounds(traces.iter().flat_map(|t| t.points.iter().map(|p| p.0)));
    let (y0, y1) = bounds(traces.iter().flat_map(|t| t.points.iter().map(&pick)));
    let inner_w = WIDTH - 2.0 * MARGIN;
    let inner_h = PANEL - MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * inner_w;
    let sy = |y: f64| top + inner_h - (y - y0) / (y1 - y0) * inner_h;
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{top}" width="{inner_w}" height="{inner_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="{}" font-size="12">{title}</text>"#, top - 6.0);
    let _ = writeln!(out, r#"<text x="4" y="{}" font-size="10">{y1:.3}</text>"#, top + 10.0);
    let _ = writeln!(out, r#"<text x="4" y="{}" font-size="10">{y0:.3}</text>"#, top + inner_h);
    for (k, trace) in traces.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" points="{}"/>"#, seg.join(" "));
            }
            seg.clear();
        };
        for p in &trace.points {
            let y = pick(p);
            if p.0.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", sx(p.0), sy(y)));
            } else {
                flush(&mut segment, out);
            }
        }
        flush(&mut segment, out);
    }
}

pub fn render(title: &str, x_label: &str, traces: &[Trace]) -> String {
    let height = 2.0 * PANEL + MARGIN;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    panel(&mut out, traces, MARGIN, "magnitude", |p| p.1);
    panel(&mut out, traces, MARGIN + PANEL, "phase (rad)", |p| p.2);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12">{}</text>"#, WIDTH / 2.0, height - 8.0, escape(x_label));
    for (k, trace) in traces.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" fill="{}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 14.0 * (k as f64 + 1.0),
            COLOURS[k % COLOURS.len()],
            escape(&trace.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
