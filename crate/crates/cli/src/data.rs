//! Observation files: one value per line, or a histogram with the header
//! `edges,counts`, one `edge,count` row per bin and a final row holding
//! only the upper edge.

use std::fmt::Write as _;
use std::path::Path;

use multigof::{Histogram, Sample};

use crate::error::{CliError, CliResult};

pub const HISTOGRAM_HEADER: &str = "edges,counts";

fn bad_line(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::unreadable(format!("line {line}: {msg}"))
}

fn parse_value(s: &str, line: usize) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad_line(line, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(bad_line(line, "value is not finite"));
    }
    Ok(v)
}

fn is_histogram(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.replace(' ', "").eq_ignore_ascii_case(HISTOGRAM_HEADER))
}

fn parse_raw(text: &str) -> CliResult<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        values.push(parse_value(l, i + 1)?);
    }
    if values.is_empty() {
        return Err(CliError::unreadable("no observations in data file"));
    }
    Ok(values)
}

fn parse_histogram(text: &str) -> CliResult<Histogram> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut edges = Vec::new();
    let mut counts = Vec::new();
    let mut closed = false;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::unreadable(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if closed {
            return Err(bad_line(line, "rows after the final upper edge"));
        }
        let edge = record
            .get(0)
            .ok_or_else(|| bad_line(line, "missing edge"))?;
        edges.push(parse_value(edge, line)?);
        match record.get(1).filter(|c| !c.is_empty()) {
            Some(c) => counts.push(
                c.parse::<u64>()
                    .map_err(|_| bad_line(line, format!("`{c}` is not a count")))?,
            ),
            None => closed = true,
        }
        if record.len() > 2 {
            return Err(bad_line(line, "expected `edge,count`"));
        }
    }
    if !closed {
        return Err(CliError::unreadable(
            "histogram must end with a row holding only the upper edge",
        ));
    }
    Histogram::new(edges, counts).map_err(|e| CliError::unreadable(e.to_string()))
}

/// Parse file contents, detecting the histogram format by its header.
pub fn parse_sample(text: &str) -> CliResult<Sample> {
    if is_histogram(text) {
        parse_histogram(text).map(Sample::Binned)
    } else {
        parse_raw(text).map(Sample::Raw)
    }
}

pub fn read_sample(path: &Path) -> CliResult<Sample> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::unreadable(format!("{}: {e}", path.display())))?;
    parse_sample(&text).map_err(|e| CliError::unreadable(format!("{}: {e}", path.display())))
}

pub fn format_raw(values: &[f64]) -> String {
    let mut s = String::new();
    for v in values {
        writeln!(s, "{v}").unwrap();
    }
    s
}

pub fn format_histogram(h: &Histogram) -> String {
    let mut s = format!("{HISTOGRAM_HEADER}\n");
    for (e, c) in h.edges().iter().zip(h.counts()) {
        writeln!(s, "{e},{c}").unwrap();
    }
    writeln!(s, "{}", h.edges()[h.counts().len()]).unwrap();
    s
}
