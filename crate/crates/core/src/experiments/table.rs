//! Column-named result tables with a stable CSV encoding.
//!
//! Numbers are written in scientific notation with 17 significant digits, rows end with `\n`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Text(_) => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x:.16e}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| Value::Num(x)).collect());
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name.
    pub fn numeric(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .column_index(name)
            .ok_or_else(|| Error::InvalidProblem(format!("missing column {name:?}")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[j].as_f64()
                    .ok_or_else(|| Error::InvalidProblem(format!("row {i}: column {name:?} is not numeric")))
            })
            .collect()
    }

    pub fn text(&self, name: &str) -> Result<Vec<String>> {
        let j = self
            .column_index(name)
            .ok_or_else(|| Error::InvalidProblem(format!("missing column {name:?}")))?;
        Ok(self.rows.iter().map(|r| r[j].to_string()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
    }

    /// Parses a CSV produced by [`Table::to_csv`]; cells that parse as numbers become numeric.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| Error::InvalidProblem(format!("CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = Self::new(columns);
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidProblem(format!("CSV row {i}: {e}")))?;
            if rec.len() != table.columns.len() {
                return Err(Error::InvalidProblem(format!("CSV row {i} has {} fields", rec.len())));
            }
            table.rows.push(
                rec.iter()
                    .map(|s| {
                        s.parse::<f64>()
                            .map(Value::Num)
                            .unwrap_or_else(|_| Value::Text(s.to_string()))
                    })
                    .collect(),
            );
        }
        Ok(table)
    }
}
