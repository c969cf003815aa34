use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Fixed 12-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        // folds -0 into 0
        format!("{:.11e}", 0.0)
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResultRow {
    pub r: f64,
    /// `inf` for the Markov reference.
    pub omega_c_tau: f64,
    pub t: f64,
    pub quantity: String,
    pub value: f64,
    pub scenario: &'static str,
}

impl SweepResultRow {
    pub const HEADER: [&'static str; 6] = ["r", "omega_c_tau", "t", "quantity", "value", "scenario"];

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.r
            .total_cmp(&other.r)
            .then(self.omega_c_tau.total_cmp(&other.omega_c_tau))
            .then(self.t.total_cmp(&other.t))
            .then_with(|| self.quantity.cmp(&other.quantity))
            .then_with(|| self.scenario.cmp(other.scenario))
    }

    fn cells(&self) -> Vec<String> {
        vec![num(self.r), num(self.omega_c_tau), num(self.t), self.quantity.clone(), num(self.value), self.scenario.to_string()]
    }
}

pub fn sort_rows(rows: &mut [SweepResultRow]) {
    rows.sort_by(SweepResultRow::key_cmp);
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn sweep(mut rows: Vec<SweepResultRow>) -> Self {
        sort_rows(&mut rows);
        Table {
            header: SweepResultRow::HEADER.to_vec(),
            rows: rows.iter().map(SweepResultRow::cells).collect(),
        }
    }

    pub fn render(&self, command: &str, config: &RunConfig) -> String {
        let mut out = String::new();
        writeln!(out, "# catzeno {command}").unwrap();
        for line in config.to_toml().lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                writeln!(out, "# {line}").unwrap();
            }
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(io(&path))?;
    Ok(path)
}

pub mod svg {
    use std::fmt::Write as _;

    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 400.0;
    const MARGIN: f64 = 50.0;
    const PALETTE: [&str; 6] = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

    pub struct Series {
        pub label: String,
        pub points: Vec<(f64, f64)>,
    }

    fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
        let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    }

    fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64)) {
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
        writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
        writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, WIDTH / 2.0).unwrap();
        writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        )
        .unwrap();
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, WIDTH / 2.0, HEIGHT - 10.0).unwrap();
        writeln!(out, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>"#, HEIGHT / 2.0, HEIGHT / 2.0).unwrap();
        for (v, anchor, px, py) in [
            (x.0, "start", MARGIN, HEIGHT - MARGIN + 15.0),
            (x.1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 15.0),
            (y.0, "end", MARGIN - 4.0, HEIGHT - MARGIN),
            (y.1, "end", MARGIN - 4.0, MARGIN + 10.0),
        ] {
            writeln!(out, r#"<text x="{px}" y="{py}" text-anchor="{anchor}">{v:.3}</text>"#).unwrap();
        }
    }

    fn project(v: f64, (lo, hi): (f64, f64), from: f64, to: f64) -> f64 {
        from + (v - lo) / (hi - lo) * (to - from)
    }

    pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
        let x = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
        let y = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
        let mut out = String::new();
        frame(&mut out, title, x_label, y_label, x, y);
        for (i, s) in series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.1.is_finite())
                .map(|&(px, py)| {
                    format!(
                        "{:.2},{:.2}",
                        project(px, x, MARGIN, WIDTH - MARGIN),
                        project(py, y, HEIGHT - MARGIN, MARGIN)
                    )
                })
                .collect();
            writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" ")).unwrap();
            writeln!(
                out,
                r#"<text x="{}" y="{}" fill="{colour}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN - 6.0,
                MARGIN + 16.0 * (i + 1) as f64,
                s.label
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn bar_chart(title: &str, x_label: &str, y_label: &str, bars: &[f64]) -> String {
        let x = (0.0, bars.len().max(1) as f64);
        let y = (0.0, bars.iter().cloned().fold(0.0, f64::max).max(1e-300));
        let mut out = String::new();
        frame(&mut out, title, x_label, y_label, x, y);
        let w = (WIDTH - 2.0 * MARGIN) / bars.len().max(1) as f64;
        for (n, p) in bars.iter().enumerate() {
            let top = project(p.max(0.0), y, HEIGHT - MARGIN, MARGIN);
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                MARGIN + n as f64 * w,
                (w * 0.8).max(0.5),
                HEIGHT - MARGIN - top,
                PALETTE[2]
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }

    /// Grey-scale map of a square field; `values[i][j]` at column `i`, row `j`.
    pub fn heatmap(title: &str, values: &[Vec<f64>], extent: f64) -> String {
        let (lo, hi) = bounds(values.iter().flatten().cloned());
        let n = values.len().max(1);
        let side = HEIGHT - 2.0 * MARGIN;
        let cell = side / n as f64;
        let mut out = String::new();
        frame(&mut out, title, "Re β", "Im β", (-extent, extent), (-extent, extent));
        for (i, column) in values.iter().enumerate() {
            for (j, v) in column.iter().enumerate() {
                let level = (255.0 * (1.0 - (v - lo) / (hi - lo))).round().clamp(0.0, 255.0) as u8;
                writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},{level})"/>"#,
                    MARGIN + i as f64 * cell,
                    HEIGHT - MARGIN - (j + 1) as f64 * cell,
                    cell + 0.05,
                    cell + 0.05
                )
                .unwrap();
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
