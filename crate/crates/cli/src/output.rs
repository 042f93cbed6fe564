//! Table (comma-delimited with `#` header lines) and JSON rendering.
//!
//! Numbers go through [`sig`] in both formats, so a JSON value parses to
//! exactly the number printed in the table.

use pathlab::format::sig;
use serde_json::{json, Map, Value as Json};

use crate::params::Resolved;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    fn table(&self) -> String {
        match self {
            Cell::Real(x) => sig(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Real(x) => real_json(*x),
            Cell::Int(n) => Json::from(*n),
            Cell::Text(s) => Json::String(s.clone()),
            Cell::Bool(b) => Json::Bool(*b),
            Cell::Missing => Json::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

pub fn real_json(x: f64) -> Json {
    let text = sig(x);
    text.parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Json::String(text), Json::Number)
}

/// Everything one run emits besides side files.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub summary: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

pub struct Header<'a> {
    pub experiment: &'a str,
    pub seed: u64,
    pub params: &'a Resolved,
}

pub fn table(header: &Header<'_>, report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# experiment = {}\n", header.experiment));
    out.push_str(&format!("# seed = {}\n", header.seed));
    for (name, value) in header.params.iter() {
        out.push_str(&format!("# param {name} = {}\n", value.echo()));
    }
    for (name, cell) in &report.summary {
        out.push_str(&format!("# result {name} = {}\n", cell.table()));
    }
    out.push_str(&report.columns.join(","));
    out.push('\n');
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(Cell::table).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn json(header: &Header<'_>, report: &Report) -> String {
    let params: Map<String, Json> = header
        .params
        .iter()
        .map(|(name, value)| (name.to_string(), value.to_json()))
        .collect();
    let summary: Map<String, Json> = report
        .summary
        .iter()
        .map(|(name, cell)| (name.to_string(), cell.json()))
        .collect();
    let rows: Vec<Json> = report
        .rows
        .iter()
        .map(|row| Json::Array(row.iter().map(Cell::json).collect()))
        .collect();
    let doc = json!({
        "experiment": header.experiment,
        "seed": header.seed,
        "params": params,
        "results": summary,
        "columns": report.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    text
}
