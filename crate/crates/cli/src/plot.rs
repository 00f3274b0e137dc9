//! Log-log SVG plots written by hand, so no plotting crate is needed.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dpsco_core::harness::fit_loglog_slope;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

fn read_series(input: &Path, x: &str, ys: &[String]) -> Result<Vec<Series>> {
    let mut reader = csv::Reader::from_path(input).with_context(|| format!("reading {}", input.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).with_context(|| format!("no column '{name}' in {}", input.display()));
    let xi = col(x)?;
    let yis = ys.iter().map(|y| col(y)).collect::<Result<Vec<_>>>()?;
    let mut series: Vec<Series> = ys.iter().map(|y| Series { name: y.clone(), points: Vec::new() }).collect();
    for row in reader.records() {
        let row = row?;
        let Ok(xv) = row[xi].parse::<f64>() else { continue };
        for (s, &yi) in series.iter_mut().zip(&yis) {
            if let Ok(yv) = row[yi].parse::<f64>() {
                if xv > 0.0 && yv > 0.0 && xv.is_finite() && yv.is_finite() {
                    s.points.push((xv, yv));
                }
            }
        }
    }
    if series.iter().all(|s| s.points.is_empty()) {
        bail!("no positive (x, y) pairs to plot on log axes");
    }
    Ok(series)
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.log10()), hi.max(v.log10())));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn svg(series: &[Series], x_label: &str) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));
    let px = |x: f64| MARGIN + (x.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{l},{t} L{l},{b} L{r},{b}" stroke="black" fill="none"/>"#);
    for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = px(10f64.powi(e));
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#, b + 5.0, b + 20.0);
    }
    for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{l}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#, l - 5.0, l - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#, WIDTH / 2.0, HEIGHT - 16.0);

    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts = ser.points.clone();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, path.join(" "));
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, px(x), py(y));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        let label = match fit_loglog_slope(&xs, &ys) {
            Some(slope) => format!("{} (slope {slope:.3})", ser.name),
            None => ser.name.clone(),
        };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" fill="{color}">{label}</text>"#, l + 10.0, t + 16.0 * (k as f64 + 1.0));
    }
    s.push_str("</svg>\n");
    s
}

pub fn render(input: &Path, x: &str, ys: &[String], out: &Path) -> Result<()> {
    let series = read_series(input, x, ys)?;
    std::fs::write(out, svg(&series, x)).with_context(|| format!("writing {}", out.display()))
}
