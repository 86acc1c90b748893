//! Input files and CSV/JSON writers.
//!
//! An input file starts with `# samples n=<n>` or `# covariance n=<n>`,
//! followed by comma-separated rows. Blank lines and further `#` lines are
//! skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::datagen::SampleSet;
use crate::linalg::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum InputData {
    Samples(SampleSet),
    Covariance(SymmetricMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Samples,
    Covariance,
}

fn parse_header(line: &str) -> Result<(Kind, usize), String> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| "first line must be '# samples n=<n>' or '# covariance n=<n>'".to_string())?;
    let mut words = body.split_whitespace();
    let kind = match words.next() {
        Some("samples") => Kind::Samples,
        Some("covariance") => Kind::Covariance,
        other => return Err(format!("unknown input kind {other:?} in header (expected samples or covariance)")),
    };
    let n = words
        .next()
        .and_then(|w| w.strip_prefix("n="))
        .ok_or_else(|| "header is missing 'n=<n>'".to_string())?;
    let n: usize = n.parse().map_err(|_| format!("invalid dimension '{n}' in header"))?;
    if n == 0 {
        return Err("dimension in header must be positive".into());
    }
    if let Some(extra) = words.next() {
        return Err(format!("unexpected '{extra}' in header"));
    }
    Ok((kind, n))
}

fn parse_row(line: &str, n: usize) -> Result<Vec<f64>, String> {
    let row = line
        .split(',')
        .map(|field| {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| format!("'{field}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite value '{field}'"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != n {
        return Err(format!("expected {n} values, found {}", row.len()));
    }
    Ok(row)
}

/// Parses the contents of an input file; errors carry the line number.
pub fn parse_input(text: &str) -> Result<InputData, String> {
    let mut lines = text.lines().enumerate();
    let (kind, n) = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => break parse_header(l).map_err(|e| format!("line {}: {e}", i + 1))?,
            None => return Err("file is empty".into()),
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        rows.push(parse_row(t, n).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    match kind {
        Kind::Samples => {
            let set = SampleSet::new(rows).map_err(|e| e.to_string())?;
            Ok(InputData::Samples(set))
        }
        Kind::Covariance => {
            if rows.len() != n {
                return Err(format!("covariance must have {n} rows, found {}", rows.len()));
            }
            let m = SymmetricMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
            Ok(InputData::Covariance(m))
        }
    }
}

pub fn read_input(path: &Path) -> Result<InputData, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))?;
    parse_input(&text).map_err(|e| CliError::input(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Header line plus one row per record; `None` cells are left empty.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (k, cell) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            match cell {
                Cell::Int(v) => write!(out, "{v}").unwrap(),
                Cell::Float(Some(v)) => write!(out, "{v:e}").unwrap(),
                Cell::Float(None) => {}
                Cell::Text(s) => out.push_str(s),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Float(Option<f64>),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(Some(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Plain numeric CSV, one matrix row per line, no header.
pub fn matrix_csv(m: &SymmetricMatrix) -> String {
    let mut out = String::new();
    for row in m.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
