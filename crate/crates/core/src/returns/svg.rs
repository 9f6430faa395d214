//! Minimal SVG renderings of return-level and QQ tables.

use std::fmt::Write;

use super::levels::{QqPoint, ReturnLevelSummary};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    log_x: bool,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, log_x: bool) -> Self {
        let range = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo <= 0.0 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let mut xs = xs.map(|x| if log_x { x.log10() } else { x });
        let mut ys = ys;
        Self { x: range(&mut xs), y: range(&mut ys), log_x }
    }

    fn px(&self, x: f64) -> f64 {
        let x = if self.log_x { x.log10() } else { x };
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>
<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>
<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {})">{}</text>
<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>
"#,
        WIDTH / 2.0,
        escape(title),
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label),
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN,
    );
}

fn ticks(out: &mut String, f: &Frame) {
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let yv = f.y.0 + t * (f.y.1 - f.y.0);
        let py = f.py(yv);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{py:.1}" text-anchor="end" font-family="sans-serif" font-size="10">{yv:.3}</text>"#,
            MARGIN - 4.0
        );
        let xv = f.x.0 + t * (f.x.1 - f.x.0);
        let label = if f.log_x { 10f64.powf(xv) } else { xv };
        let px = MARGIN + t * (WIDTH - 2.0 * MARGIN);
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{label:.3}</text>"#,
            HEIGHT - MARGIN + 14.0
        );
    }
}

fn bar(out: &mut String, x: f64, lo: f64, hi: f64) {
    let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="grey"/>"#);
}

fn dot(out: &mut String, x: f64, y: f64) {
    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="black"/>"#);
}

/// Posterior medians with interval bars against return period (log axis),
/// and the predictive curve.
pub fn return_level_svg(rows: &[ReturnLevelSummary], title: &str) -> String {
    let f = Frame::new(
        rows.iter().map(|r| r.return_period),
        rows.iter().flat_map(|r| [r.credible_interval.0, r.credible_interval.1, r.predictive_level.unwrap_or(f64::NAN)]),
        true,
    );
    let mut out = String::new();
    header(&mut out, title, "return period (blocks)", "return level");
    ticks(&mut out, &f);
    for r in rows {
        let x = f.px(r.return_period);
        bar(&mut out, x, f.py(r.credible_interval.0), f.py(r.credible_interval.1));
        dot(&mut out, x, f.py(r.posterior_median));
    }
    let curve: Vec<String> = rows
        .iter()
        .filter_map(|r| r.predictive_level.map(|v| format!("{:.2},{:.2}", f.px(r.return_period), f.py(v))))
        .collect();
    if !curve.is_empty() {
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, curve.join(" "));
    }
    out.push_str("</svg>\n");
    out
}

/// Fitted posterior medians against data, with pointwise bands and the
/// identity line.
pub fn qq_svg(rows: &[QqPoint], title: &str) -> String {
    let all = rows.iter().flat_map(|r| [r.empirical, r.lo, r.hi]);
    let f = Frame::new(all.clone(), all, false);
    let mut out = String::new();
    header(&mut out, title, "fitted (posterior median)", "empirical");
    ticks(&mut out, &f);
    let (a, b) = (f.x.0.max(f.y.0), f.x.1.min(f.y.1));
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue"/>"#,
        f.px(a),
        f.py(a),
        f.px(b),
        f.py(b)
    );
    for r in rows {
        let y = f.py(r.empirical);
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="grey"/>"#, f.px(r.lo), f.px(r.hi));
        dot(&mut out, f.px(r.fitted_median), y);
    }
    out.push_str("</svg>\n");
    out
}
