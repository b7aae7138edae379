//! Static SVG power curve: estimates with 95% interval bars against n.

use std::fmt::Write;

use crate::report::PowerRow;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// Tick positions covering `[lo, hi]` at a 1-2-5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1.0);
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn power_curve_svg(rows: &[PowerRow], reference: Option<f64>) -> String {
    let (n_lo, n_hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.n as f64), b.max(r.n as f64)));
    let (n_lo, n_hi) = if n_hi > n_lo { (n_lo, n_hi) } else { (n_lo - 1.0, n_hi + 1.0) };
    let x = |n: f64| LEFT + (n - n_lo) / (n_hi - n_lo) * (W - LEFT - RIGHT);
    let y = |p: f64| TOP + (1.0 - p) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if let Some(first) = rows.first() {
        let title = format!("{} (alpha = {}, {} reps)", first.scenario, first.alpha, first.reps);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&title));
    }
    for p in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{0:.1}" x2="{1}" y2="{0:.1}" stroke="#ddd"/>"##, y(p), W - RIGHT);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{p:.1}</text>"#, LEFT - 6.0, y(p) + 4.0);
    }
    for t in ticks(n_lo, n_hi) {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{t}</text>"#, x(t), H - BOTTOM + 18.0);
    }
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#333"/>"##, W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">power</text>"#, (TOP + H - BOTTOM) / 2.0);
    if let Some(r) = reference {
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{0:.1}" x2="{1}" y2="{0:.1}" stroke="#c33" stroke-dasharray="5,4"/>"##, y(r), W - RIGHT);
    }

    let points: Vec<String> = rows.iter().map(|r| format!("{:.1},{:.1}", x(r.n as f64), y(r.power))).collect();
    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="2"/>"##, points.join(" "));
    for r in rows {
        let cx = x(r.n as f64);
        let _ = writeln!(s, r##"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#1f5fa8"/>"##, y(r.ci95[0]), y(r.ci95[1]));
        let _ = writeln!(s, r##"<circle cx="{cx:.1}" cy="{:.1}" r="3" fill="#1f5fa8"><title>n = {}: {:.4}</title></circle>"##, y(r.power), r.n, r.power);
    }
    s.push_str("</svg>\n");
    s
}
