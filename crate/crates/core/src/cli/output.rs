//! CSV, JSON and SVG writers for the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::quadrature::GridFunction;
use crate::solver::{EigenPair, ScanSample};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Emit {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Emit {
    pub fn parse(list: &str) -> std::result::Result<Self, String> {
        let mut e = Emit::default();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "csv" => e.csv = true,
                "json" => e.json = true,
                "svg" => e.svg = true,
                other => return Err(format!("unknown output format `{other}` (expected csv, json, svg)")),
            }
        }
        Ok(e)
    }
}

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

/// Columns `t, u, u_minus_y` over every node, history included.
pub fn write_solution_csv(path: &Path, u: &GridFunction, y: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "u", "u_minus_y"])?;
    for ((&t, &a), &b) in u.nodes().iter().zip(u.values()).zip(y.values()) {
        w.serialize((t, a, a - b))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * MARGIN)
    }

    fn polyline(&self, svg: &mut String, pts: &[(f64, f64)], color: &str) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="13">"#
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        let _ = writeln!(svg, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, escape(title));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 15.0, escape(xlabel));
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
        for k in 0..=4 {
            let fx = self.x.0 + (self.x.1 - self.x.0) * k as f64 / 4.0;
            let fy = self.y.0 + (self.y.1 - self.y.0) * k as f64 / 4.0;
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, self.px(fx), H - MARGIN + 18.0, tick(fx));
            let _ = writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN - 6.0, self.py(fy) + 4.0, tick(fy));
        }
    }
}

fn tick(x: f64) -> String {
    format!("{:.3}", x).trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

/// `n(λ)` over the converged samples, the level `ρ` and a marker at each `λ*`.
pub fn svg_norm_curve(samples: &[ScanSample], rho: f64, pairs: &[EigenPair], title: &str) -> String {
    let pts: Vec<(f64, f64)> = samples.iter().filter_map(|s| s.norm.map(|n| (s.lambda, n))).collect();
    let x = bounds(samples.iter().map(|s| s.lambda).chain(pairs.iter().map(|p| p.lambda_star)).chain([0.0]));
    let y = bounds(pts.iter().map(|p| p.1).chain([0.0, rho * 1.1]));
    let frame = Frame::new(x, y);
    let mut svg = String::new();
    frame.axes(&mut svg, title, "λ", "n(λ) = ‖u_λ − y‖");
    frame.polyline(&mut svg, &pts, "#1f77b4");
    for &(a, b) in &pts {
        let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f77b4"/>"##, frame.px(a), frame.py(b));
    }
    for s in samples.iter().filter(|s| s.norm.is_none()) {
        let _ = writeln!(
            svg,
            r##"<line x1="{0:.2}" x2="{0:.2}" y1="{1:.2}" y2="{2:.2}" stroke="#bbbbbb" stroke-dasharray="2,3"/>"##,
            frame.px(s.lambda),
            frame.py(frame.y.0),
            frame.py(frame.y.1)
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{}" x2="{}" y1="{2:.2}" y2="{2:.2}" stroke="#d62728" stroke-dasharray="6,4"/>"##,
        MARGIN,
        W - MARGIN,
        frame.py(rho)
    );
    let _ = writeln!(svg, r##"<text x="{}" y="{:.2}" fill="#d62728">ρ = {rho}</text>"##, W - MARGIN - 70.0, frame.py(rho) - 6.0);
    for p in pairs {
        let (cx, cy) = (frame.px(p.lambda_star), frame.py(rho));
        let _ = writeln!(svg, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="6" fill="none" stroke="#2ca02c" stroke-width="2"/>"##);
        let _ = writeln!(svg, r##"<text x="{:.2}" y="{:.2}" fill="#2ca02c">λ* = {:.6}</text>"##, cx + 8.0, cy + 18.0, p.lambda_star);
    }
    svg.push_str("</svg>\n");
    svg
}

/// `u` over `[-r, 1]` together with the vertex function `y`.
pub fn svg_solution(u: &GridFunction, y: &GridFunction, title: &str) -> String {
    let x = (u.nodes()[0], 1.0);
    let yb = bounds(u.values().iter().chain(y.values()).copied().chain([0.0]));
    let frame = Frame::new(x, yb);
    let mut svg = String::new();
    frame.axes(&mut svg, title, "t", "u(t)");
    let line = |g: &GridFunction| -> Vec<(f64, f64)> { g.nodes().iter().copied().zip(g.values().iter().copied()).collect() };
    frame.polyline(&mut svg, &line(y), "#999999");
    frame.polyline(&mut svg, &line(u), "#1f77b4");
    let _ = writeln!(
        svg,
        r##"<line x1="{0:.2}" x2="{0:.2}" y1="{1}" y2="{2}" stroke="#cccccc"/>"##,
        frame.px(0.0),
        MARGIN,
        H - MARGIN
    );
    let _ = writeln!(svg, r##"<text x="{}" y="{}" fill="#1f77b4">u</text>"##, W - MARGIN - 60.0, MARGIN + 20.0);
    let _ = writeln!(svg, r##"<text x="{}" y="{}" fill="#999999">y</text>"##, W - MARGIN - 60.0, MARGIN + 38.0);
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_list() {
        assert_eq!(Emit::parse("csv,svg").unwrap(), Emit { csv: true, json: false, svg: true });
        assert!(Emit::parse("csv,png").is_err());
    }

    #[test]
    fn solution_svg_is_well_formed() {
        let nodes = GridFunction::uniform_nodes(0.5, 33).unwrap();
        let u = GridFunction::from_fn(nodes.clone(), |t| 1.0 - t * t).unwrap();
        let y = GridFunction::from_fn(nodes, |t| 1.0 - t).unwrap();
        let svg = svg_solution(&u, &y, "a < b");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("width=\"800\" height=\"600\""));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
