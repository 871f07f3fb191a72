//! Tabular output: CSV with full-precision floats, or JSON with the same
//! values, written atomically to a file or to stdout.

use std::path::Path;

use serde_json::{json, Value};

use crate::config::OutputFormat;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            // 17 significant digits: round-trip exact for f64.
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra scalar results carried into the JSON object and echoed to
    /// stderr for CSV runs.
    pub summary: Vec<(&'static str, f64)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self, command: &str) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::to_json).collect()))
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("command".into(), json!(command));
        obj.insert("columns".into(), json!(self.columns));
        obj.insert("rows".into(), Value::Array(rows));
        for (key, value) in &self.summary {
            obj.insert((*key).into(), json!(value));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
        text.push('\n');
        text
    }

    /// Render and write the table. The full output is built in memory
    /// first, so a failed run never leaves a partial file behind.
    pub fn write(
        &self,
        command: &str,
        format: OutputFormat,
        out: Option<&Path>,
    ) -> Result<(), CliError> {
        let text = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(command),
        };
        if format == OutputFormat::Csv {
            for (key, value) in &self.summary {
                eprintln!("{key} = {value:.9}");
            }
        }
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| {
                CliError::numeric(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}
