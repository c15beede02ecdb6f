//! Report rendering. CSV carries `#` metadata lines, a header row and reals
//! with 17 significant digits; JSON is `{meta, rows}`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use super::config::{Params, Value};
use super::CliError;

pub const TOOL: &str = concat!("bosonic ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Flag(v) => v.to_string(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Real(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Flag(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Tabular result with run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub params: Params,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Truncation dimensions, leakage and tolerance figures, in insertion order.
    pub diagnostics: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(params: Params, columns: &[&'static str]) -> Self {
        Self {
            params,
            columns: columns.to_vec(),
            rows: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Cell>) {
        self.diagnostics.push((key.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&format!("# tool: {TOOL}\n"));
        out.push_str(&format!("# command: {}\n", self.params.command));
        for (k, v) in &self.params.values {
            out.push_str(&format!("# config.{k} = {v}\n"));
        }
        for (k, v) in &self.diagnostics {
            out.push_str(&format!("# diag.{k} = {}\n", v.csv()));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::csv))
                .map_err(csv_error)?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let config: Map<String, Json> = self
            .params
            .values
            .iter()
            .map(|(k, v)| {
                let j = match v {
                    Value::Real(x) => json!(x),
                    Value::Int(x) => json!(x),
                    Value::Text(x) => json!(x),
                    Value::Flag(x) => json!(x),
                };
                (k.clone(), j)
            })
            .collect();
        let diagnostics: Map<String, Json> = self
            .diagnostics
            .iter()
            .map(|(k, v)| (k.clone(), v.json()))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Json::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": {
                "tool": TOOL,
                "command": self.params.command,
                "columns": self.columns,
                "config": config,
                "diagnostics": diagnostics,
            },
            "rows": rows,
        });
        let mut text =
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Rows of a JSON report keyed by column, for round-trip checks.
pub fn json_rows(text: &str) -> Result<Vec<BTreeMap<String, Json>>, CliError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| CliError::Io(e.to_string()))?;
    let rows = doc["rows"]
        .as_array()
        .ok_or_else(|| CliError::Io("report has no rows array".into()))?;
    Ok(rows
        .iter()
        .filter_map(|r| r.as_object())
        .map(|r| r.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
        .collect())
}
