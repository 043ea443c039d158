//! JSONL trace files: one header object, then one object per evaluation.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{ObservationTrace, TraceMeta};

pub const TRACE_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    schema: u32,
    #[serde(default)]
    benchmark: String,
    #[serde(default)]
    af: String,
    #[serde(default)]
    seed: u64,
    dim: usize,
    #[serde(default)]
    doe: usize,
    #[serde(default = "plain")]
    variant: String,
}

fn plain() -> String {
    "plain".into()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    t: usize,
    x: Vec<f64>,
    y: f64,
}

/// Serialize a trace; floats use the shortest representation that round-trips exactly.
pub fn format_trace(trace: &ObservationTrace) -> Result<String> {
    let m = &trace.meta;
    let header = Header {
        schema: TRACE_SCHEMA,
        benchmark: m.benchmark.clone(),
        af: m.af.clone(),
        seed: m.seed,
        dim: trace.dim(),
        doe: m.doe,
        variant: if m.variant.is_empty() { plain() } else { m.variant.clone() },
    };
    let mut out = serde_json::to_string(&header).map_err(|e| Error::InvalidInput(e.to_string()))?;
    out.push('\n');
    for (i, (x, &y)) in trace.points().iter().zip(trace.values()).enumerate() {
        if !y.is_finite() {
            return Err(Error::InvalidInput(format!("evaluation {} has non-finite value {y}", i + 1)));
        }
        let row = Row { t: i + 1, x: x.clone(), y };
        out.push_str(&serde_json::to_string(&row).map_err(|e| Error::InvalidInput(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

struct RawTrace {
    meta: TraceMeta,
    dim: usize,
    header_line: usize,
    rows: Vec<(usize, Row)>,
}

fn parse_raw(text: &str) -> Result<RawTrace> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hl, first) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty trace file".into() })?;
    let header: Header = serde_json::from_str(first).map_err(|e| Error::Parse { line: hl + 1, msg: e.to_string() })?;
    if header.schema != TRACE_SCHEMA {
        return Err(Error::Format { line: hl + 1, msg: format!("unsupported schema {}", header.schema) });
    }
    if header.dim == 0 {
        return Err(Error::Format { line: hl + 1, msg: "trace dimension must be positive".into() });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let row: Row = serde_json::from_str(line).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        if row.x.len() != header.dim {
            return Err(Error::Format { line: line_no, msg: format!("x has {} coordinates, header says dim {}", row.x.len(), header.dim) });
        }
        if row.t != rows.len() + 1 {
            return Err(Error::Format { line: line_no, msg: format!("expected t = {}, found {}", rows.len() + 1, row.t) });
        }
        rows.push((line_no, row));
    }
    if header.doe > rows.len() {
        return Err(Error::Format { line: hl + 1, msg: format!("header declares {} design points but the trace has {}", header.doe, rows.len()) });
    }
    let meta = TraceMeta { benchmark: header.benchmark, af: header.af, variant: header.variant, seed: header.seed, doe: header.doe };
    Ok(RawTrace { meta, dim: header.dim, header_line: hl + 1, rows })
}

/// Parse a trace; errors carry the 1-based line number.
pub fn parse_trace(text: &str) -> Result<ObservationTrace> {
    let raw = parse_raw(text)?;
    let mut trace = ObservationTrace::new(raw.dim, raw.meta).map_err(|e| Error::Format { line: raw.header_line, msg: e.to_string() })?;
    for (line_no, row) in raw.rows {
        trace.push(row.x, row.y).map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
    }
    Ok(trace)
}

/// Metadata and points of a trace without the unit-cube check, for auditing
/// traces that may have left the domain. Coordinates must still be finite.
pub fn parse_points_unchecked(text: &str) -> Result<(TraceMeta, Vec<Vec<f64>>)> {
    let raw = parse_raw(text)?;
    let mut points = Vec::with_capacity(raw.rows.len());
    for (line_no, row) in raw.rows {
        if let Some(v) = row.x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Format { line: line_no, msg: format!("non-finite coordinate {v}") });
        }
        points.push(row.x);
    }
    Ok((raw.meta, points))
}

pub fn write_trace(path: &Path, trace: &ObservationTrace) -> Result<()> {
    let text = format_trace(trace)?;
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<ObservationTrace> {
    parse_trace(&fs::read_to_string(path)?)
}

pub fn read_points_unchecked(path: &Path) -> Result<(TraceMeta, Vec<Vec<f64>>)> {
    parse_points_unchecked(&fs::read_to_string(path)?)
}
