//! Tables and their JSON and CSV renderings.
//!
//! Non-finite numbers are written as the strings "inf", "-inf" and "nan" in
//! both formats. JSON numbers use the shortest text that reads back to the
//! same binary value; CSV numbers carry 12 significant digits.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Null,
    /// Named numbers, an object in JSON and `name=value;...` in CSV.
    Details(Vec<(String, f64)>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

fn non_finite(v: f64) -> Option<&'static str> {
    if v.is_nan() {
        Some("nan")
    } else if v == f64::INFINITY {
        Some("inf")
    } else if v == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

pub fn json_number(v: f64) -> Value {
    match non_finite(v) {
        Some(s) => Value::String(s.into()),
        None => Value::from(v),
    }
}

/// `v` with 12 significant digits, trailing zeros removed.
pub fn csv_number(v: f64) -> String {
    if let Some(s) = non_finite(v) {
        return s.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let text = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding may have pushed the value to one more digit; that is fine
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exponent) = s.split_once('e').unwrap();
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exponent}")
    };
    if text == "-0" {
        "0".into()
    } else {
        text
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => json_number(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
            Cell::Details(d) => Value::Object(d.iter().map(|(k, v)| (k.clone(), json_number(*v))).collect()),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => csv_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
            Cell::Details(d) => d
                .iter()
                .map(|(k, v)| format!("{k}={}", csv_number(*v)))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// A command result: rows under fixed columns, plus optional summary
/// fields that only appear in JSON.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Table {
            command,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, cell)| (c.to_string(), cell.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.summary {
            doc.insert(k.to_string(), v.clone());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers() {
        assert_eq!(csv_number(-0.125), "-0.125");
        assert_eq!(csv_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(csv_number(-2.0 / 3.0 * 1e-9), "-6.66666666667e-10");
        assert_eq!(csv_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(csv_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(csv_number(0.0), "0");
        assert_eq!(csv_number(2.0), "2");
        assert_eq!(csv_number(-1e-20), "-1e-20");
    }

    #[test]
    fn json_numbers() {
        assert_eq!(json_number(-0.1875).to_string(), "-0.1875");
        assert_eq!(json_number(0.1).to_string(), "0.1");
        assert_eq!(json_number(f64::NEG_INFINITY), Value::String("-inf".into()));
    }
}
