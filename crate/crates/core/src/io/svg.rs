//! Ternary (barycentric) plot of a simplex trajectory as standalone SVG.
//!
//! Cooperators sit at the top vertex (blue), defectors bottom-left (red)
//! and loners bottom-right (yellow).

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::analysis::FrequencySeries;

pub const WIDTH: f64 = 600.0;
pub const HEIGHT: f64 = 540.0;
const SIDE: f64 = 500.0;
const TOP: f64 = 50.0;
const MAX_POINTS: usize = 4000;

pub const COLORS: [&str; 3] = ["#1f5fd6", "#d62728", "#e8c21a"];
const LABELS: [&str; 3] = ["C", "D", "L"];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("cannot plot an empty trajectory")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Screen positions of the C, D and L vertices.
pub fn vertices() -> [(f64, f64); 3] {
    let h = SIDE * 3f64.sqrt() / 2.0;
    let left = (WIDTH - SIDE) / 2.0;
    [
        (WIDTH / 2.0, TOP),
        (left, TOP + h),
        (left + SIDE, TOP + h),
    ]
}

/// Barycentric projection of `(x, y, z)` onto the triangle.
pub fn project(f: [f64; 3]) -> (f64, f64) {
    let v = vertices();
    let px = (0..3).map(|i| f[i] * v[i].0).sum();
    let py = (0..3).map(|i| f[i] * v[i].1).sum();
    (px, py)
}

pub fn render_simplex<T: FrequencySeries + ?Sized>(traj: &T) -> Result<String, PlotError> {
    let rows = traj.frequencies();
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let v = vertices();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<polygon class="simplex" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="#444" stroke-width="1.5"/>"##,
        v[0].0, v[0].1, v[1].0, v[1].1, v[2].0, v[2].1
    );
    let label_at = [(v[0].0, v[0].1 - 15.0), (v[1].0 - 22.0, v[1].1 + 20.0), (v[2].0 + 22.0, v[2].1 + 20.0)];
    for i in 0..3 {
        let _ = writeln!(
            s,
            r#"<circle class="vertex" cx="{:.3}" cy="{:.3}" r="6" fill="{}"/>"#,
            v[i].0, v[i].1, COLORS[i]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="18" text-anchor="middle" fill="{}">{}</text>"#,
            label_at[i].0, label_at[i].1, COLORS[i], LABELS[i]
        );
    }

    if rows.len() > 1 {
        let stride = rows.len().div_ceil(MAX_POINTS);
        let mut points = String::new();
        let mut push = |f: [f64; 3]| {
            let (x, y) = project(f);
            let _ = write!(points, "{x:.3},{y:.3} ");
        };
        for r in rows.iter().step_by(stride) {
            push(*r);
        }
        if !(rows.len() - 1).is_multiple_of(stride) {
            push(rows[rows.len() - 1]);
        }
        let _ = writeln!(
            s,
            r#"<polyline class="trajectory" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            points.trim_end()
        );
    }
    let (mx, my) = project(rows[0]);
    let _ = writeln!(
        s,
        r#"<circle class="marker" cx="{mx:.3}" cy="{my:.3}" r="4" fill="black"/>"#
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn plot_simplex<T: FrequencySeries + ?Sized>(traj: &T, out: &Path) -> Result<(), PlotError> {
    let svg = render_simplex(traj)?;
    std::fs::write(out, svg).map_err(|source| PlotError::Io {
        path: out.display().to_string(),
        source,
    })
}
