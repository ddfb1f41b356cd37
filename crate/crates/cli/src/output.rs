//! CSV and JSON emission. Floats print as the shortest decimal that
//! round-trips; JSON adds the exact hexadecimal form next to it.

use std::io::Write;

use cuspsum_core::bounds::Evaluation;
use cuspsum_core::hexfloat::format_hex;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::I(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:?}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => float(*x),
            Cell::I(i) => json!(i),
            Cell::S(s) => json!(s),
        }
    }
}

/// `{"dec": <number or null>, "hex": "<hex float>"}`.
pub fn float(x: f64) -> Value {
    let dec = if x.is_finite() { json!(x) } else { Value::Null };
    json!({ "dec": dec, "hex": format_hex(x) })
}

/// A table of rows plus a few summary values.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.summary.push((key, value.into()));
    }

    /// Rows only; the summary goes to `notes` as `key=value` lines.
    pub fn write_csv(&self, w: &mut dyn Write, notes: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::csv).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        for (k, v) in &self.summary {
            writeln!(notes, "{k}={}", v.csv())?;
        }
        Ok(())
    }

    pub fn to_json(&self, command: &str) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
        json!({ "command": command, "rows": rows, "summary": summary })
    }
}

pub fn evaluation_json(e: &Evaluation) -> Value {
    let inputs: Map<String, Value> = e.inputs.iter().map(|(k, v)| (k.to_string(), float(*v))).collect();
    let terms: Map<String, Value> = e.terms.iter().map(|(k, v)| (k.to_string(), float(*v))).collect();
    json!({
        "theorem": e.theorem,
        "inputs": inputs,
        "branch": e.branch,
        "flags": e.flags,
        "value": e.value.map_or(Value::Null, float),
        "terms": terms,
    })
}

pub fn evaluation_report(e: &Evaluation) -> Report {
    let mut r = Report::new(&["theorem", "branch", "value", "value_hex", "flags"]);
    r.row(vec![
        e.theorem.into(),
        e.branch.clone().into(),
        e.value.map_or(Cell::S(String::new()), Cell::F),
        e.value.map_or(String::new(), format_hex).into(),
        e.flags.join(";").into(),
    ]);
    r
}

pub fn write_json(w: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)
}
