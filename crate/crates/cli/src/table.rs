//! Tabular output: CSV with 17 significant digits, or JSON.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Value as Json};

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

/// Floats as `d.dddddddddddddddde±x`: 17 significant digits, exact round trip.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Num(v) => format_float(*v),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Null => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::from(*v),
            Value::Text(s) => Json::from(s.clone()),
            Value::Bool(b) => Json::from(*b),
            Value::Null => Json::Null,
        }
    }
}

/// Column names carry their unit in brackets, e.g. `t [time]` or `R [1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_row(&self, row: &[Value]) -> Json {
        let mut map = Map::new();
        for (c, v) in self.columns.iter().zip(row) {
            map.insert(c.clone(), v.json());
        }
        Json::Object(map)
    }

    pub fn json_rows(&self) -> Json {
        Json::Array(self.rows.iter().map(|r| self.json_row(r)).collect())
    }

    pub fn json_record(&self) -> Json {
        self.rows.first().map_or(Json::Null, |r| self.json_row(r))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Value::csv_field))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A command result: the flat table for CSV and the JSON document.
pub struct Output {
    pub table: Table,
    pub json: Json,
}

impl Output {
    pub fn rows(table: Table) -> Self {
        let json = table.json_rows();
        Self { table, json }
    }

    pub fn record(table: Table) -> Self {
        let json = table.json_record();
        Self { table, json }
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> CliResult<()> {
        let mut sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Csv => self.table.write_csv(&mut sink)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink, &self.json)?;
                sink.write_all(b"\n")?;
            }
        }
        sink.flush()?;
        Ok(())
    }
}
