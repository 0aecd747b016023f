//! CSV emission and parsing.
//!
//! Layout: `#`-prefixed provenance lines, one header row of `name [unit]`
//! cells, then data. Floats use Rust's shortest round-trip formatting, so a
//! parse of the emitted text reproduces the arrays bit for bit; infinities
//! are written as `inf` / `-inf`.

use super::{Column, ColumnData, PlotKind, PlotSpec, Provenance, SweepResult};
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Unit tag marking a text column.
pub const CSV_TEXT_UNIT: &str = "label";

pub fn write_csv(result: &SweepResult, mut out: impl Write) -> Result<()> {
    let p = &result.provenance;
    writeln!(out, "# tool: {}", p.tool)?;
    writeln!(out, "# scenario: {}", p.scenario)?;
    writeln!(out, "# config-sha256: {}", p.config_sha256)?;
    for note in &p.notes {
        writeln!(out, "# note: {note}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(result.columns.iter().map(Column::header)).map_err(csv_err)?;
    for row in 0..result.rows() {
        let cells = result.columns.iter().map(|c| match &c.data {
            ColumnData::Numeric(v) => format_float(v[row]),
            ColumnData::Text(v) => v[row].clone(),
        });
        w.write_record(cells).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest text that parses back to the same `f64`; exponent form outside
/// `[1e-4, 1e15)`.
fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    parse_csv(&std::fs::read_to_string(path)?)
}

/// Inverse of [`write_csv`]. The plot spec is not stored and comes back as
/// a plain line plot of every numeric column.
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut provenance = Provenance::default();
    let mut body_start = 0;
    let mut line_offset = 0;
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else { break };
        body_start += line.len() + 1;
        line_offset += 1;
        let comment = comment.trim_start();
        if let Some(v) = comment.strip_prefix("tool: ") {
            provenance.tool = v.to_string();
        } else if let Some(v) = comment.strip_prefix("scenario: ") {
            provenance.scenario = v.to_string();
        } else if let Some(v) = comment.strip_prefix("config-sha256: ") {
            provenance.config_sha256 = v.to_string();
        } else if let Some(v) = comment.strip_prefix("note: ") {
            provenance.notes.push(v.to_string());
        }
    }
    let body = text.get(body_start.min(text.len())..).unwrap_or("");
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let headers = reader
        .headers()
        .map_err(|e| parse_err(line_offset + 1, e.to_string()))?
        .clone();
    let mut columns = Vec::with_capacity(headers.len());
    for h in headers.iter() {
        let (name, unit) = split_header(h).ok_or_else(|| parse_err(line_offset + 1, format!("header `{h}` is not `name [unit]`")))?;
        columns.push(if unit == CSV_TEXT_UNIT {
            Column::text(name, vec![])
        } else {
            Column::numeric(name, unit, vec![])
        });
    }
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize) + line_offset;
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize) + line_offset;
        for (col, cell) in columns.iter_mut().zip(record.iter()) {
            match &mut col.data {
                ColumnData::Text(v) => v.push(cell.to_string()),
                ColumnData::Numeric(v) => v.push(
                    cell.trim()
                        .parse()
                        .map_err(|_| parse_err(line, format!("`{cell}` in column `{}` is not a number", col.name)))?,
                ),
            }
        }
    }
    let series = columns
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.values().is_some())
        .map(|(i, _)| i)
        .collect();
    Ok(SweepResult {
        columns,
        provenance,
        plot: PlotSpec {
            kind: PlotKind::Lines,
            title: String::new(),
            x_log: false,
            y_log: false,
            series,
        },
        references: vec![],
    })
}

/// Splits `name [unit]`.
pub(crate) fn split_header(h: &str) -> Option<(&str, &str)> {
    let h = h.trim();
    let open = h.rfind('[')?;
    let unit = h[open + 1..].strip_suffix(']')?;
    let name = h[..open].trim_end();
    (!name.is_empty()).then_some((name, unit))
}
