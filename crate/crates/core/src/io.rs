//! Matrix files in, sweep tables and plots out.
//!
//! Matrix files are whitespace-separated rows, one matrix row per line, with
//! `#` starting a comment. A file whose first non-blank character is `{` is
//! read as JSON: `{"matrix": [[...], ...]}`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use log::warn;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{check_spd, Matrix, SymMatrix};
use crate::optimizer::{CapacityCurve, CurvePoint};

pub const SWEEP_CSV_HEADER: &str = "t_tau,bits_per_block,bits_per_symbol";

pub fn parse_matrix_file(path: impl AsRef<Path>) -> Result<SymMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_matrix_str(&text)
}

#[derive(Deserialize)]
struct JsonMatrix {
    matrix: Vec<Vec<f64>>,
}

fn parse_rows_text(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut row = Vec::new();
        let mut rest = content;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let token_end = rest[start..]
                .find(char::is_whitespace)
                .map_or(rest.len(), |e| start + e);
            let token = &rest[start..token_end];
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_idx + 1,
                column: content[..offset + start].chars().count() + 1,
                message: format!("not a number: {token:?}"),
            })?;
            row.push(value);
            offset += token_end;
            rest = &rest[token_end..];
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn parse_rows_json(text: &str) -> Result<Vec<Vec<f64>>> {
    serde_json::from_str::<JsonMatrix>(text)
        .map(|j| j.matrix)
        .map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
}

/// Parses, symmetrizes and PSD-validates a channel covariance.
///
/// A smallest eigenvalue within `±tol` is accepted with a warning; below
/// `-tol` it is rejected.
pub fn parse_matrix_str(text: &str) -> Result<SymMatrix> {
    let rows = if text.trim_start().starts_with('{') {
        parse_rows_json(text)?
    } else {
        parse_rows_text(text)?
    };
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            row: i + 1,
            columns: r.len(),
        });
    }
    let matrix = SymMatrix::new(Matrix::from_rows(&rows)?)?;
    let tol = matrix.default_pd_tolerance();
    let report = check_spd(&matrix, tol);
    if !report.is_psd {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
            tolerance: tol,
        });
    }
    if !report.is_pd {
        warn!(
            "channel covariance is singular to tolerance: min eigenvalue {:.3e}",
            report.min_eigenvalue
        );
    }
    Ok(matrix)
}

/// One summary line: `argmax=<t> max_bits_per_block=<v> bits_per_symbol=<v>`.
pub fn sweep_summary(curve: &CapacityCurve) -> String {
    format!(
        "argmax={} max_bits_per_block={} bits_per_symbol={}",
        curve.argmax_t_tau,
        curve.max_bits,
        curve.max_bits / curve.block_length as f64
    )
}

/// Writes the sweep table followed by a `# argmax=...` summary line.
///
/// Values use Rust's shortest round-trip formatting, so parsing them back
/// recovers the exact `f64`.
pub fn write_sweep_csv<W: Write>(curve: &CapacityCurve, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for e in &curve.entries {
        writeln!(out, "{},{},{}", e.t_tau, e.bits_per_block, curve.bits_per_symbol(e))?;
    }
    writeln!(out, "# {}", sweep_summary(curve))
}

/// Reads a sweep table back and recomputes its summary. The block length is
/// the last `t_tau`, since sweeps cover `[1, T]`.
pub fn parse_sweep_csv(text: &str) -> Result<CapacityCurve> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h.trim() == SWEEP_CSV_HEADER => {}
        other => {
            return Err(Error::Parse {
                line: other.map_or(1, |(i, _)| i + 1),
                column: 1,
                message: format!("expected header {SWEEP_CSV_HEADER:?}"),
            })
        }
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let err = |column: usize, message: String| Error::Parse {
            line: i + 1,
            column,
            message,
        };
        if fields.len() != 3 {
            return Err(err(1, format!("expected 3 fields, got {}", fields.len())));
        }
        let t_tau = fields[0]
            .parse()
            .map_err(|_| err(1, format!("bad t_tau {:?}", fields[0])))?;
        let bits_per_block = fields[1]
            .parse()
            .map_err(|_| err(2, format!("bad bits_per_block {:?}", fields[1])))?;
        entries.push(CurvePoint {
            t_tau,
            bits_per_block,
        });
    }
    let block_length = entries.last().map_or(0, |e| e.t_tau);
    CapacityCurve::from_entries(block_length, entries)
}

fn nice_step(range: f64, target_ticks: f64) -> f64 {
    let raw = (range / target_ticks).max(f64::MIN_POSITIVE);
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5.0);
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let v = first + k as f64 * step;
        if v > hi + 1e-9 * step {
            break;
        }
        out.push(v);
        k += 1;
    }
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Self-contained SVG line plot of capacity against the number of pilots,
/// with the optimum marked.
pub fn render_capacity_svg(curve: &CapacityCurve, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;

    let x_lo = curve.entries.first().map_or(1, |e| e.t_tau) as f64;
    let x_hi = (curve.entries.last().map_or(1, |e| e.t_tau) as f64).max(x_lo + 1.0);
    let finite = curve.entries.iter().map(|e| e.bits_per_block).filter(|v| v.is_finite());
    let y_min = finite.clone().fold(0.0, f64::min);
    let mut y_max = finite.fold(0.0, f64::max);
    if y_max <= y_min {
        y_max = y_min + 1.0;
    }
    let y_hi = y_max + 0.05 * (y_max - y_min);
    let y_lo = y_min;

    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT + pw,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let points: Vec<String> = curve
        .entries
        .iter()
        .filter(|e| e.bits_per_block.is_finite())
        .map(|e| format!("{:.2},{:.2}", sx(e.t_tau as f64), sy(e.bits_per_block)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    let (ax, ay) = (sx(curve.argmax_t_tau as f64), sy(curve.max_bits));
    let _ = writeln!(
        svg,
        r#"<circle cx="{ax:.2}" cy="{ay:.2}" r="4" fill="crimson"/><text x="{:.2}" y="{:.2}" fill="crimson">T_tau = {}</text>"#,
        ax + 8.0,
        ay - 8.0,
        curve.argmax_t_tau
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">training symbols T_tau</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">capacity [bits/block]</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
