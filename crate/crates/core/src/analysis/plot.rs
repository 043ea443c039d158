use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};

const PALETTE: [&str; 10] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Named series sharing one `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WideTable {
    pub t: Vec<usize>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl WideTable {
    pub fn new(t: Vec<usize>, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if columns.is_empty() {
            return invalid("plot data needs at least one series");
        }
        for (name, v) in &columns {
            if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
                return invalid(format!("series name {name:?} cannot be written as a CSV header"));
            }
            if v.len() != t.len() {
                return invalid(format!("series {name} has {} values for {} t values", v.len(), t.len()));
            }
        }
        Ok(Self { t, columns })
    }

    /// `t,name1,name2,…` header plus one row per `t`; floats round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, t) in self.t.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for (_, v) in &self.columns {
                write!(out, ",{}", v[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty CSV".into() })?;
        let names: Vec<&str> = header.split(',').collect();
        if names.first() != Some(&"t") || names.len() < 2 {
            return Err(Error::Format { line: 1, msg: "header must be t followed by series names".into() });
        }
        let mut t = Vec::new();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len() - 1];
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != names.len() {
                return Err(Error::Format { line: line_no, msg: format!("{} fields, expected {}", fields.len(), names.len()) });
            }
            t.push(fields[0].parse().map_err(|e| Error::Parse { line: line_no, msg: format!("t: {e}") })?);
            for (c, f) in cols.iter_mut().zip(&fields[1..]) {
                c.push(f.parse().map_err(|e| Error::Parse { line: line_no, msg: format!("{f:?}: {e}") })?);
            }
        }
        Self::new(t, names[1..].iter().map(|s| s.to_string()).zip(cols).collect())
    }

    /// Line chart with one polyline per series and a legend.
    pub fn to_svg(&self, title: &str, y_label: &str) -> String {
        let (w, h) = (720.0, 420.0);
        let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
        let finite = self.columns.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite());
        let (mut ymin, mut ymax) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !ymin.is_finite() {
            (ymin, ymax) = (0.0, 1.0);
        }
        if ymax - ymin < 1e-12 {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let tmin = *self.t.first().unwrap_or(&0) as f64;
        let tmax = (*self.t.last().unwrap_or(&1) as f64).max(tmin + 1.0);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |t: f64| left + (t - tmin) / (tmax - tmin) * pw;
        let sy = |y: f64| top + (ymax - y) / (ymax - ymin) * ph;

        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
        writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
        writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title)).unwrap();
        writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
        for k in 0..=4 {
            let y = ymin + (ymax - ymin) * k as f64 / 4.0;
            let t = tmin + (tmax - tmin) * k as f64 / 4.0;
            writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, sy(y) + 4.0, tick(y)).unwrap();
            writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, sx(t), h - bottom + 18.0, tick(t)).unwrap();
        }
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, left + pw / 2.0, h - 10.0).unwrap();
        writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, top + ph / 2.0, top + ph / 2.0, escape(y_label)).unwrap();
        for (i, (name, v)) in self.columns.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = self
                .t
                .iter()
                .zip(v)
                .filter(|(_, y)| y.is_finite())
                .map(|(&t, &y)| format!("{:.2},{:.2}", sx(t as f64), sy(y)))
                .collect();
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")).unwrap();
            let ly = top + 14.0 + 18.0 * i as f64;
            writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - right + 10.0, w - right + 30.0).unwrap();
            writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - right + 36.0, ly + 4.0, escape(name)).unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write `{stem}.csv` and, when `svg` is set, `{stem}.svg`; returns the written paths.
pub fn emit_plot_data(table: &WideTable, stem: &Path, title: &str, y_label: &str, svg: bool) -> Result<Vec<PathBuf>> {
    let csv = stem.with_extension("csv");
    fs::write(&csv, table.to_csv())?;
    let mut out = vec![csv];
    if svg {
        let p = stem.with_extension("svg");
        fs::write(&p, table.to_svg(title, y_label))?;
        out.push(p);
    }
    Ok(out)
}
