//! Plot artifacts: SVG line charts with a CSV of the plotted points, and
//! recurrence plots as binary PGM.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use gaitnl_core::rqa::write_pgm;

use crate::registry::{Artifact, Curve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Keeps names usable as file names on every platform.
pub fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if s.is_empty() { "_".into() } else { s }
}

/// `<file>__<column>__<algorithm>` without extension.
pub fn artifact_stem(file: &str, column: &str, algorithm: &str) -> String {
    format!("{}__{}__{}", sanitize(file), sanitize(column), sanitize(algorithm))
}

/// Write every artifact of one task into `dir`, returning the paths.
pub fn write_artifacts(dir: &Path, stem: &str, artifacts: &[Artifact]) -> io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for a in artifacts {
        match a {
            Artifact::Curve(c) => {
                let svg = dir.join(format!("{stem}.svg"));
                std::fs::write(&svg, render_svg(c))?;
                let csv = dir.join(format!("{stem}.csv"));
                write_curve_csv(c, &csv)?;
                paths.extend([svg, csv]);
            }
            Artifact::Recurrence(plot) => {
                let pgm = dir.join(format!("{stem}.pgm"));
                let mut w = BufWriter::new(File::create(&pgm)?);
                write_pgm(plot, &mut w)?;
                w.flush()?;
                paths.push(pgm);
            }
        }
    }
    Ok(paths)
}

pub fn write_curve_csv(c: &Curve, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![c.x_label.to_string()];
    header.extend(c.series.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    for (i, x) in c.x.iter().enumerate() {
        let mut row = vec![x.to_string()];
        row.extend(c.series.iter().map(|(_, v)| v[i].map_or_else(String::new, |v| v.to_string())));
        w.write_record(&row)?;
    }
    w.flush()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn render_svg(c: &Curve) -> String {
    let tx = |v: f64| if c.log_log { v.log10() } else { v };
    let points: Vec<Vec<(f64, f64)>> = c
        .series
        .iter()
        .map(|(_, ys)| {
            c.x.iter()
                .zip(ys)
                .filter_map(|(&x, y)| y.map(|y| (tx(x), tx(y))))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    let all = points.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        (x0, x1) = (x0.min(0.0) - 0.5, x1.max(0.0) + 0.5);
    }
    if !(y0 < y1) {
        (y0, y1) = (y0.min(0.0) - 0.5, y1.max(0.0) + 0.5);
    }
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;
    let log = if c.log_log { "log10 " } else { "" };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&c.title));
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, x) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, HEIGHT - MARGIN + 16.0, tick(v));
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{}</text>"#, MARGIN - 6.0, tick(v));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{log}{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 18.0,
        escape(c.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{log}{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(c.y_label)
    );
    for (k, ((name, _), pts)) in c.series.iter().zip(&points).enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for &(x, y) in pts.iter().filter(|_| pts.len() <= 64) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}"/>"#, sx(x), sy(y));
        }
        if c.series.len() > 1 {
            let ly = MARGIN + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN - 8.0,
                escape(name)
            );
        }
    }
    if let Some(f) = c.fit {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="5,4"/>"#,
            sx(f.from),
            sy(f.slope * f.from + f.intercept),
            sx(f.to),
            sy(f.slope * f.to + f.intercept)
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">slope {:.4}</text>"#, MARGIN + 8.0, MARGIN + 16.0, f.slope);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> Curve {
        Curve {
            title: "a < b".into(),
            x_label: "lag",
            y_label: "ami",
            x: vec![0.0, 1.0, 2.0],
            series: vec![("ami".into(), vec![Some(1.0), None, Some(0.25)])],
            log_log: false,
            fit: None,
        }
    }

    #[test]
    fn names_are_sanitised() {
        assert_eq!(artifact_stem("walk 01", "hip/x", "dfa"), "walk_01__hip_x__dfa");
    }

    #[test]
    fn svg_is_escaped_and_skips_gaps() {
        let svg = render_svg(&demo());
        assert!(svg.contains("a &lt; b"));
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(line.matches(',').count(), 2);
    }

    #[test]
    fn csv_leaves_undefined_cells_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_curve_csv(&demo(), &p).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "lag,ami\n0,1\n1,\n2,0.25\n");
    }
}
