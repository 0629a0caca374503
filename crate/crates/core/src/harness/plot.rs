use std::fmt::Write as _;
use std::path::Path;

use super::fit::RateFitResult;
use crate::error::{Error, Result};

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

/// Static log-log plot of cell risks with the fitted line.
pub fn fit_svg(fit: &RateFitResult, title: &str) -> String {
    let pts: Vec<(f64, f64)> = fit
        .cells
        .iter()
        .filter(|c| !c.excluded)
        .map(|c| (c.predictor.ln(), c.trimmed_mean.ln()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    for x in [x0, x1] {
        let y = fit.intercept + fit.slope * x;
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="2"/>"#,
        sx(x0),
        sy(fit.intercept + fit.slope * x0),
        sx(x1),
        sy(fit.intercept + fit.slope * x1)
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{} (slope {:.3}, r² {:.3}, theory {:.3})</text>"#,
        escape(title),
        fit.slope,
        fit.r_squared,
        fit.theoretical_slope
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log predictor</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">log {} risk</text>"#,
        H / 2.0,
        H / 2.0,
        escape(&fit.loss_kind)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_fit_svg(fit: &RateFitResult, title: &str, path: &Path) -> Result<()> {
    std::fs::write(path, fit_svg(fit, title)).map_err(|e| Error::io(path, e))
}
