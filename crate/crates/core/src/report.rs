//! Tabular CSV and JSON-lines reporting.
//!
//! Columns are `experiment`, the input echo, the outputs (an exact rational
//! expands to a `num/den` column and a `_decimal` column), then `version`,
//! `rng` and finally `timestamp`. Only the timestamp varies between
//! identical runs.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_decimal, format_ratio, parse_ratio, to_f64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" | "jsonl" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown output format {other:?} (csv|json)"))),
        }
    }
}

/// One output cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Real(f64),
    Int(i128),
    Text(String),
    Missing,
}

impl Value {
    fn cells(&self) -> Vec<String> {
        match self {
            Value::Exact(q) => vec![format_ratio(q), format_decimal(to_f64(q))],
            Value::Real(x) => vec![format_decimal(*x)],
            Value::Int(i) => vec![i.to_string()],
            Value::Text(s) => vec![s.clone()],
            Value::Missing => vec![String::new()],
        }
    }

    fn width(&self) -> usize {
        if matches!(self, Value::Exact(_)) {
            2
        } else {
            1
        }
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

impl From<&BigRational> for Value {
    fn from(q: &BigRational) -> Self {
        Value::Exact(q.clone())
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i128)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i128)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Text(if b { "PASS" } else { "FAIL" }.into())
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Provenance attached to every row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub version: String,
    pub rng: String,
    pub timestamp: String,
}

impl Provenance {
    pub fn now() -> Self {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            version: crate::VERSION.to_string(),
            rng: crate::montecarlo::RNG_FAMILY.to_string(),
            timestamp: format!("unix:{secs}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(String, Value)>,
    pub provenance: Provenance,
}

impl ReportRow {
    pub fn new(experiment: &str, provenance: &Provenance) -> Self {
        Self { experiment: experiment.to_string(), inputs: Vec::new(), outputs: Vec::new(), provenance: provenance.clone() }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.outputs.push((key.to_string(), value.into()));
        self
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["experiment".to_string()];
        h.extend(self.inputs.iter().map(|(k, _)| k.clone()));
        for (k, v) in &self.outputs {
            h.push(k.clone());
            if v.width() == 2 {
                h.push(format!("{k}_decimal"));
            }
        }
        h.extend(["version".into(), "rng".into(), "timestamp".into()]);
        h
    }

    pub fn cells(&self) -> Vec<String> {
        let mut c = vec![self.experiment.clone()];
        c.extend(self.inputs.iter().map(|(_, v)| v.clone()));
        for (_, v) in &self.outputs {
            c.extend(v.cells());
        }
        c.extend([self.provenance.version.clone(), self.provenance.rng.clone(), self.provenance.timestamp.clone()]);
        c
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn check_rows(rows: &[ReportRow]) -> Result<Vec<String>> {
    let first = rows.first().ok_or_else(|| Error::InvalidParameter("no report rows to emit".into()))?;
    let header = first.header();
    if rows.iter().any(|r| r.header() != header) {
        return Err(Error::InvalidParameter("report rows have differing columns".into()));
    }
    Ok(header)
}

/// CSV with a header line; every line ends in `\n`.
pub fn render_csv(rows: &[ReportRow]) -> Result<String> {
    let header = check_rows(rows)?;
    let mut out = String::new();
    for line in std::iter::once(header).chain(rows.iter().map(ReportRow::cells)) {
        let fields: Vec<String> = line.iter().map(|f| csv_field(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// One JSON object per row, keys in column order.
pub fn render_jsonl(rows: &[ReportRow]) -> Result<String> {
    let header = check_rows(rows)?;
    let mut out = String::new();
    for row in rows {
        let fields: Vec<String> = header
            .iter()
            .zip(row.cells())
            .map(|(k, v)| format!("{}:{}", serde_json::Value::from(k.as_str()), serde_json::Value::from(v)))
            .collect();
        out.push('{');
        out.push_str(&fields.join(","));
        out.push_str("}\n");
    }
    Ok(out)
}

pub fn render(rows: &[ReportRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_jsonl(rows),
    }
}

/// Writes the table to `path`, or to standard output when `path` is `None`.
pub fn emit_table(rows: &[ReportRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(rows, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reads back an exact cell written as `num/den`.
pub fn parse_exact_cell(cell: &str) -> Result<BigRational> {
    parse_ratio(cell)
}
