//! Tabular output. Every command produces a `Table`; CSV writes the header
//! row then one line per row, JSON writes one object per row.

use num_traits::ToPrimitive;
use onedep::series::Rational;
use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

pub enum Cell {
    Int(u64),
    /// Arbitrary-size nonnegative integer, kept as digits.
    Big(String),
    Rat(Rational),
    Text(String),
}

pub struct Table {
    pub command: &'static str,
    pub params: Map<String, Value>,
    pub columns: Vec<&'static str>,
    /// Which columns hold rationals (and get an approximate twin).
    pub rational: Vec<bool>,
    pub rows: Vec<Vec<Cell>>,
}

/// Canonical `num/den`, denominator always present.
pub fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// 15 significant digits. Lossy.
pub fn render_decimal(r: &Rational) -> String {
    match r.to_f64() {
        Some(x) => format!("{x:.14e}"),
        None => "nan".to_string(),
    }
}

fn approx_name(col: &str) -> String {
    format!("{col}_approx")
}

impl Table {
    /// Columns named with a leading `=` hold rationals.
    pub fn new(command: &'static str, spec: &[&'static str]) -> Self {
        let columns = spec.iter().map(|c| c.trim_start_matches('=')).collect();
        let rational = spec.iter().map(|c| c.starts_with('=')).collect();
        Table {
            command,
            params: Map::new(),
            columns,
            rational,
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn render(&self, format: Format, decimal: bool) -> String {
        match format {
            Format::Csv => self.csv(decimal),
            Format::Json => self.json(decimal),
        }
    }

    fn csv(&self, decimal: bool) -> String {
        let mut header: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        if decimal {
            header.extend(
                self.columns
                    .iter()
                    .zip(&self.rational)
                    .filter(|(_, &r)| r)
                    .map(|(c, _)| approx_name(c)),
            );
        }
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Big(s) => s.clone(),
                    Cell::Rat(r) => render_rational(r),
                    Cell::Text(s) => csv_escape(s),
                })
                .collect();
            if decimal {
                fields.extend(row.iter().filter_map(|c| match c {
                    Cell::Rat(r) => Some(render_decimal(r)),
                    _ => None,
                }));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, decimal: bool) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Int(v) => json!(v),
                        Cell::Big(s) => json!(s),
                        Cell::Rat(r) => {
                            if decimal {
                                obj.insert(approx_name(col), json!(render_decimal(r)));
                            }
                            json!(render_rational(r))
                        }
                        Cell::Text(s) => json!(s),
                    };
                    obj.insert(col.to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "columns": self.columns,
            "approximate_decimals": decimal,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
