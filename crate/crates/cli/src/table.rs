//! Plain numeric tables and their CSV/JSON encodings.

use std::io::{Read, Write};

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
        }
    }

    fn parse(s: &str) -> Option<Cell> {
        let s = s.trim();
        if let Ok(i) = s.parse::<i64>() {
            return Some(Cell::Int(i));
        }
        s.parse::<f64>().ok().map(Cell::Float)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Cell::Int(i) => *i as f64,
            Cell::Float(x) => *x,
        }
    }

    fn to_json(self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(x.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self
                .rows
                .iter()
                .map(|r| r.iter().map(|c| c.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// Parses a table written by [`Table::write_csv`] (or any numeric CSV with a header).
    pub fn read_csv<R: Read>(input: R) -> Result<Table, String> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| format!("header: {e}"))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = Table::new(columns);
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(|e| format!("row {}: {e}", i + 1))?;
            if record.len() != table.columns.len() {
                return Err(format!(
                    "row {}: expected {} fields, found {}",
                    i + 1,
                    table.columns.len(),
                    record.len()
                ));
            }
            let row = record
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    Cell::parse(s).ok_or_else(|| format!("row {}, column `{}`: not a number: {s:?}", i + 1, table.columns[j]))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j].as_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Table::new(["k", "x"]);
        t.push(vec![Cell::Int(-3), Cell::Float(0.1)]);
        t.push(vec![Cell::Int(7), Cell::Float(-1.0 / 3.0)]);
        t.push(vec![Cell::Int(0), Cell::Float(6.02e23)]);
        let s = t.to_csv_string();
        assert!(s.starts_with("k,x\n-3,1.0000000000000001e-1\n"));
        let back = Table::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_ragged_and_non_numeric() {
        assert!(Table::read_csv("a,b\n1\n".as_bytes()).is_err());
        assert!(Table::read_csv("a,b\n1,x\n".as_bytes()).is_err());
    }
}
