//! Scan tables (CSV) and the hierarchical run report (TOML).

use std::io::Write;
use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Flat table: coordinate columns, then `value`, then `certificate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub coords: Vec<String>,
    pub rows: Vec<(Vec<Cell>, f64, f64)>,
}

impl Table {
    pub fn new(name: impl Into<String>, coords: &[&str]) -> Self {
        Table {
            name: name.into(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, coords: Vec<Cell>, value: f64, certificate: f64) {
        debug_assert_eq!(coords.len(), self.coords.len());
        self.rows.push((coords, value, certificate));
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.coords.join(",");
        if !out.is_empty() {
            out.push(',');
        }
        out.push_str("value,certificate\n");
        for (c, v, cert) in &self.rows {
            for cell in c {
                out.push_str(&cell.render());
                out.push(',');
            }
            out.push_str(&format_f64(*v));
            out.push(',');
            out.push_str(&format_f64(*cert));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut f = std::fs::File::create(&path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(path)
    }
}

/// Summary entries of one suite, kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub toml::Table);

impl Summary {
    pub fn num(&mut self, key: &str, v: f64) {
        // TOML has no NaN-free guarantee; non-finite values go in as strings
        let value = if v.is_finite() {
            toml::Value::Float(v)
        } else {
            toml::Value::String(format_f64(v))
        };
        self.0.insert(key.into(), value);
    }

    pub fn int(&mut self, key: &str, v: usize) {
        self.0.insert(key.into(), toml::Value::Integer(v as i64));
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) {
        self.0.insert(key.into(), toml::Value::String(v.into()));
    }

    pub fn flag(&mut self, key: &str, v: bool) {
        self.0.insert(key.into(), toml::Value::Boolean(v));
    }

    pub fn table(&mut self, key: &str, t: Summary) {
        self.0.insert(key.into(), toml::Value::Table(t.0));
    }
}

/// What a suite hands back to the orchestrator.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub pass: bool,
    pub tables: Vec<Table>,
    pub summary: Summary,
}
