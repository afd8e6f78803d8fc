//! Versioned, deterministic reports in json, csv and plain text.
//!
//! A report is a table (`columns` + `rows`) plus optional basis labels,
//! named pass/fail checks and notes. Every number is an integer or an exact
//! rational rendered as `num/den`; there are no floats anywhere. Timing is
//! only present when explicitly requested, so reports stay byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Inverse of `render` for csv input.
    fn parse(s: &str) -> Cell {
        if let Ok(x) = s.parse::<i64>() {
            Cell::Int(x)
        } else if let Ok(b) = s.parse::<bool>() {
            Cell::Bool(b)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: CommandEcho,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Report {
    pub fn new(name: &str, params: BTreeMap<String, String>, columns: &[&str]) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: CommandEcho {
                name: name.to_string(),
                params,
            },
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            labels: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }

    /// All checks pass (vacuously true without checks).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(s)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// Only the table; labels, checks and notes are json/text-only.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(false)
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv of utf-8 fields")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self
            .command
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let _ = writeln!(out, "# {} {}", self.command.name, params.join(" "));
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::render).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.columns[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| -> String {
            let padded: Vec<String> = fields
                .iter()
                .zip(&widths)
                .map(|(f, &w)| format!("{f:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let _ = writeln!(out, "{}", line(&self.columns));
        for r in &cells {
            let _ = writeln!(out, "{}", line(r));
        }
        for (k, v) in &self.labels {
            let _ = writeln!(out, "{k}: {}", v.join(", "));
        }
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name);
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(out, "# time {t} ms");
        }
        out
    }
}

/// Reads back the table written by [`Report::to_csv`].
pub fn read_csv(s: &str) -> Result<(Vec<String>, Vec<Vec<Cell>>)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(s.as_bytes());
    let parse_err = |e: csv::Error| Error::Parse(e.to_string());
    let columns = r
        .headers()
        .map_err(parse_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(parse_err)?.iter().map(Cell::parse).collect());
    }
    Ok((columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut params = BTreeMap::new();
        params.insert("d".into(), "4".into());
        let mut r = Report::new("demo", params, &["m", "coeff", "note", "ok"]);
        r.push_row(vec![
            1usize.into(),
            "-1/2".into(),
            "a,\"b\"".into(),
            true.into(),
        ]);
        r.push_row(vec![(-3i64).into(), "7".into(), "".into(), false.into()]);
        r.labels.insert("x".into(), vec!["B21".into()]);
        r.check("something", true);
        r
    }

    #[test]
    fn json_roundtrip() {
        let r = sample();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        let empty = Report::new("e2", BTreeMap::new(), &["s", "q", "dim"]);
        let back = Report::from_json(&empty.to_json()).unwrap();
        assert!(back.rows.is_empty());
        assert_eq!(empty.to_csv(), "s,q,dim\n");
    }

    #[test]
    fn csv_roundtrip() {
        let r = sample();
        let (cols, rows) = read_csv(&r.to_csv()).unwrap();
        assert_eq!(cols, r.columns);
        // "7" reads back as an integer, which renders identically
        assert_eq!(rows[0], r.rows[0]);
        assert_eq!(rows[1][1], Cell::Int(7));
        assert_eq!(rows[1][2], Cell::Text(String::new()));
    }

    #[test]
    fn wrong_schema_rejected() {
        let s = sample()
            .to_json()
            .replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(Report::from_json(&s).is_err());
    }

    #[test]
    fn text_has_everything() {
        let t = sample().to_text();
        assert!(t.starts_with("# demo d=4\n"));
        assert!(t.contains("[ok] something"));
        assert!(t.contains("x: B21"));
    }
}
