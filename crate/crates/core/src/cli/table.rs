use std::io::Write;

use serde_json::{Map, Value};

use crate::scalar::{NumericMode, Rational, Scalar};

use super::args::Format;

#[derive(Debug, Clone)]
pub(crate) enum Cell {
    Empty,
    Int(u128),
    Text(String),
    Exact(Rational),
    Float(f64),
}

/// Conversion of a numeric-mode value into an output cell.
pub(crate) trait ToCell {
    fn cell(&self) -> Cell;
}

impl ToCell for Rational {
    fn cell(&self) -> Cell {
        Cell::Exact(self.clone())
    }
}

impl ToCell for f64 {
    fn cell(&self) -> Cell {
        Cell::Float(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Plain,
    Exact,
}

/// A rectangular result. In CSV, exact columns split into `_num` and `_den`.
#[derive(Debug)]
pub(crate) struct Table {
    columns: Vec<(String, ColumnKind)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new() -> Self {
        Table {
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Integer or text column.
    pub fn plain(mut self, name: &str) -> Self {
        self.columns.push((name.to_owned(), ColumnKind::Plain));
        self
    }

    /// Numeric column whose layout follows `mode`.
    pub fn numeric(mut self, name: &str, mode: NumericMode) -> Self {
        let kind = match mode {
            NumericMode::Exact => ColumnKind::Exact,
            NumericMode::Float => ColumnKind::Plain,
        };
        self.columns.push((name.to_owned(), kind));
        self
    }

    pub fn exact(self, name: &str) -> Self {
        self.numeric(name, NumericMode::Exact)
    }

    pub fn numeric_for<T: Scalar>(self, name: &str) -> Self {
        self.numeric(name, T::MODE)
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = Vec::new();
        for (name, kind) in &self.columns {
            match kind {
                ColumnKind::Plain => header.push(name.clone()),
                ColumnKind::Exact => {
                    header.push(format!("{name}_num"));
                    header.push(format!("{name}_den"));
                }
            }
        }
        writer.write_record(&header)?;
        for row in &self.rows {
            let mut record = Vec::with_capacity(header.len());
            for (cell, (_, kind)) in row.iter().zip(&self.columns) {
                match (cell, kind) {
                    (Cell::Exact(r), ColumnKind::Exact) => {
                        record.push(r.numer().to_string());
                        record.push(r.denom().to_string());
                    }
                    (Cell::Empty, ColumnKind::Exact) => {
                        record.push(String::new());
                        record.push(String::new());
                    }
                    (cell, _) => record.push(csv_text(cell)),
                }
            }
            writer.write_record(&record)?;
        }
        writer.flush()
    }

    fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|((name, _), cell)| (name.clone(), json_value(cell)))
                    .collect();
                Value::Object(object)
            })
            .collect();
        serde_json::to_writer(&mut *out, &rows)?;
        out.write_all(b"\n")
    }
}

/// 17 significant digits, locale-independent.
pub(crate) fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_text(cell: &Cell) -> String {
    match cell {
        Cell::Empty => String::new(),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Exact(r) => r.to_string(),
        Cell::Float(x) => format_float(*x),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Empty => Value::Null,
        Cell::Int(i) => match u64::try_from(*i) {
            Ok(small) => Value::from(small),
            Err(_) => Value::String(i.to_string()),
        },
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Exact(r) => Value::String(format!("{}/{}", r.numer(), r.denom())),
        Cell::Float(x) => serde_json::Number::from_f64(*x)
            .map(Value::Number)
            .unwrap_or(Value::Null),
    }
}
