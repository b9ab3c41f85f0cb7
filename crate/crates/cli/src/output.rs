//! CSV and JSON rendering.
//!
//! Reals are written as `{:.16e}` in CSV, 17 significant digits, which
//! round-trips every double. JSON uses serde_json's shortest exact form.

use grover4d::statevector::ProbabilityTrace;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::args::Format;

pub const TRACE_COLUMNS: [&str; 8] = [
    "t",
    "p_success",
    "p_min",
    "p_max",
    "kbar_re",
    "kbar_im",
    "lbar_re",
    "lbar_im",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Real(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Real(_) | Cell::Null => s.serialize_none(),
        }
    }
}

/// How a table is laid out in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// An array of row objects.
    Rows,
    /// A single object.
    Record,
    /// A bare value: one column, one row, no CSV header.
    Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub shape: Shape,
}

struct RowRef<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct RowsRef<'a>(&'a Report);

impl Serialize for RowsRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for row in &self.0.rows {
            seq.serialize_element(&RowRef(&self.0.columns, row))?;
        }
        seq.end()
    }
}

impl Report {
    pub fn rows(columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Self {
        Self {
            columns,
            rows,
            shape: Shape::Rows,
        }
    }

    pub fn record(columns: Vec<&'static str>, row: Vec<Cell>) -> Self {
        Self {
            columns,
            rows: vec![row],
            shape: Shape::Record,
        }
    }

    pub fn scalar(column: &'static str, value: Cell) -> Self {
        Self {
            columns: vec![column],
            rows: vec![vec![value]],
            shape: Shape::Scalar,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.shape != Shape::Scalar {
            out.push_str(&self.columns.join(","));
            out.push('\n');
        }
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let text = match self.shape {
            Shape::Rows => serde_json::to_string_pretty(&RowsRef(self)),
            Shape::Record | Shape::Scalar => {
                serde_json::to_string_pretty(&RowRef(&self.columns, &self.rows[0]))
            }
        };
        let mut text = text.expect("cells always serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn trace_report(trace: &ProbabilityTrace) -> Report {
    let rows = trace
        .entries
        .iter()
        .map(|e| {
            vec![
                Cell::Int(e.t),
                Cell::Real(e.p_success),
                Cell::Real(e.p_min),
                Cell::Real(e.p_max),
                Cell::Real(e.kbar.re),
                Cell::Real(e.kbar.im),
                Cell::Real(e.lbar.re),
                Cell::Real(e.lbar.im),
            ]
        })
        .collect();
    Report::rows(TRACE_COLUMNS.to_vec(), rows)
}
