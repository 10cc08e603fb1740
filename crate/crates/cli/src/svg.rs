//! Plain-text SVG figures.

use std::fmt::Write;

use crate::report::{PersistenceOut, PortraitOut, ScanOut};

const MARGIN: f64 = 50.0;

/// Maps `[lo, hi]` onto `[a, b]`; a degenerate range maps to the midpoint.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, a: f64, b: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self { lo, hi, a, b }
    }

    fn padded(lo: f64, hi: f64, a: f64, b: f64) -> Self {
        let pad = 0.05 * (hi - lo).abs().max(1e-12);
        Self::new(lo - pad, hi + pad, a, b)
    }

    fn map(&self, v: f64) -> f64 {
        self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)
    }
}

fn open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

fn text(s: &mut String, x: f64, y: f64, anchor: &str, body: &str) {
    let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"{anchor}\">{body}</text>");
}

fn line(s: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, extra: &str) {
    let _ = writeln!(
        s,
        "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"black\" {extra}/>"
    );
}

fn g(v: f64) -> String {
    format!("{v:.3e}")
}

/// A titled box for figures with nothing to show.
pub fn placeholder(title: &str, message: &str) -> String {
    let mut s = open(420.0, 160.0);
    s.push_str("<rect x=\"10\" y=\"10\" width=\"400\" height=\"140\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n");
    text(&mut s, 210.0, 60.0, "middle", title);
    text(&mut s, 210.0, 90.0, "middle", message);
    s.push_str("</svg>\n");
    s
}

/// One panel per mode; within a panel one whisker per eigenvalue index with
/// the point estimate as a dot. All panels share the vertical scale.
pub fn eigenportrait(portraits: &[PortraitOut]) -> String {
    if portraits.is_empty() {
        return placeholder("Eigenportrait", "no candidate modes (k = 0)");
    }
    let d = portraits[0].gamma_rectangles.len().max(1);
    let panel_w = (40.0 * d as f64 + 40.0).max(140.0);
    let panel_h = 260.0;
    let width = MARGIN * 2.0 + panel_w * portraits.len() as f64;
    let height = panel_h + 2.0 * MARGIN;

    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for p in portraits {
        for r in &p.gamma_rectangles {
            lo = lo.min(r[0]);
            hi = hi.max(r[1]);
        }
    }
    let y = Scale::padded(lo, hi, MARGIN + panel_h, MARGIN);

    let mut s = open(width, height);
    text(&mut s, MARGIN - 6.0, y.map(hi), "end", &g(hi));
    text(&mut s, MARGIN - 6.0, y.map(lo), "end", &g(lo));
    for (j, p) in portraits.iter().enumerate() {
        let x0 = MARGIN + panel_w * j as f64;
        let verdict = if p.significant { "significant" } else { "not significant" };
        let _ = writeln!(s, "<g class=\"panel\" data-mode=\"{j}\">");
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{MARGIN}\" width=\"{panel_w:.2}\" height=\"{panel_h}\" fill=\"none\" stroke=\"gray\"/>"
        );
        line(&mut s, x0, y.map(0.0), x0 + panel_w, y.map(0.0), "stroke-dasharray=\"4 3\" stroke-opacity=\"0.6\"");
        text(&mut s, x0 + panel_w / 2.0, MARGIN - 18.0, "middle", &format!("mode {}", j + 1));
        text(&mut s, x0 + panel_w / 2.0, MARGIN - 4.0, "middle", verdict);
        let colour = if p.significant { "black" } else { "firebrick" };
        for (i, r) in p.gamma_rectangles.iter().enumerate() {
            let x = x0 + 20.0 + (panel_w - 40.0) * (i as f64 + 0.5) / d as f64;
            let _ = writeln!(
                s,
                "<line class=\"whisker\" x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{colour}\" stroke-width=\"2\"/>",
                y.map(r[0]),
                y.map(r[1])
            );
            if let Some(&gh) = p.gamma_hat.get(i) {
                let _ = writeln!(
                    s,
                    "<circle class=\"estimate\" cx=\"{x:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{colour}\"/>",
                    y.map(gh)
                );
            }
            text(&mut s, x, MARGIN + panel_h + 16.0, "middle", &format!("γ{}", i + 1));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Death on the horizontal axis, birth on the vertical. Points inside the
/// shaded band of width `2 band` above the diagonal are drawn hollow.
pub fn persistence(p: &PersistenceOut) -> String {
    if p.pairs.is_empty() {
        return placeholder("Persistence diagram", "no components");
    }
    let size = 360.0;
    let lo = p.pairs.iter().map(|q| q[0]).fold(f64::INFINITY, f64::min).min(0.0);
    let hi = p.pairs.iter().map(|q| q[1]).fold(f64::NEG_INFINITY, f64::max);
    let x = Scale::padded(lo, hi, MARGIN, MARGIN + size);
    let y = Scale::padded(lo, hi, MARGIN + size, MARGIN);
    let mut s = open(size + 2.0 * MARGIN, size + 2.0 * MARGIN);
    let (a, b) = (x.lo, x.hi);
    let w = 2.0 * p.band;
    let _ = writeln!(
        s,
        "<polygon class=\"band\" points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"steelblue\" fill-opacity=\"0.25\"/>",
        x.map(a),
        y.map(a),
        x.map(b),
        y.map(b),
        x.map(b),
        y.map(b + w),
        x.map(a),
        y.map(a + w)
    );
    line(&mut s, x.map(a), y.map(a), x.map(b), y.map(b), "");
    for (q, keep) in p.pairs.iter().zip(&p.retained) {
        let fill = if *keep { "black" } else { "white" };
        let _ = writeln!(
            s,
            "<circle class=\"pair\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{fill}\" stroke=\"black\"/>",
            x.map(q[0]),
            y.map(q[1])
        );
    }
    text(&mut s, MARGIN + size / 2.0, MARGIN + size + 30.0, "middle", "death");
    text(&mut s, MARGIN - 30.0, MARGIN + size / 2.0, "middle", "birth");
    text(&mut s, MARGIN + size / 2.0, MARGIN - 15.0, "middle", &format!("band 2ε = {}", g(w)));
    s.push_str("</svg>\n");
    s
}

/// `k(h)` dashed and `N(h)` solid against `log h`, with `h_hat` marked.
pub fn bandwidth(scan: &ScanOut) -> String {
    if scan.h.is_empty() {
        return placeholder("Bandwidth scan", "empty grid");
    }
    let (w, h) = (480.0, 280.0);
    let logs: Vec<f64> = scan.h.iter().map(|v| v.ln()).collect();
    let x = Scale::new(logs[0], logs[logs.len() - 1], MARGIN, MARGIN + w);
    let top = scan.k.iter().chain(&scan.n).copied().max().unwrap_or(1).max(1) as f64;
    let y = Scale::new(0.0, top, MARGIN + h, MARGIN);
    let poly = |counts: &[usize]| {
        logs.iter()
            .zip(counts)
            .map(|(l, &c)| format!("{:.2},{:.2}", x.map(*l), y.map(c as f64)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = open(w + 2.0 * MARGIN, h + 2.0 * MARGIN);
    line(&mut s, MARGIN, MARGIN + h, MARGIN + w, MARGIN + h, "");
    line(&mut s, MARGIN, MARGIN, MARGIN, MARGIN + h, "");
    let _ = writeln!(
        s,
        "<polyline class=\"k\" points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
        poly(&scan.k)
    );
    let _ = writeln!(
        s,
        "<polyline class=\"N\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>",
        poly(&scan.n)
    );
    let xh = x.map(scan.h_hat.ln());
    line(&mut s, xh, MARGIN, xh, MARGIN + h, "stroke=\"firebrick\" stroke-dasharray=\"2 2\"");
    text(&mut s, xh, MARGIN - 6.0, "middle", &format!("ĥ = {}", g(scan.h_hat)));
    text(&mut s, MARGIN, MARGIN + h + 18.0, "start", &g(scan.h[0]));
    text(&mut s, MARGIN + w, MARGIN + h + 18.0, "end", &g(scan.h[scan.h.len() - 1]));
    text(&mut s, MARGIN + w / 2.0, MARGIN + h + 36.0, "middle", "h (log scale); dashed k(h), solid N(h)");
    text(&mut s, MARGIN - 8.0, MARGIN + 4.0, "end", &format!("{top}"));
    text(&mut s, MARGIN - 8.0, MARGIN + h, "end", "0");
    s.push_str("</svg>\n");
    s
}
