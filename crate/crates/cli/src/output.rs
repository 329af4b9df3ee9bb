//! Tabular artifacts with a provenance header.
//!
//! CSV files start with `#` comment lines carrying the invocation and every
//! resolved config key. JSON files carry the same information in a leading
//! `header` object.

use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::config::ScenarioConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Json::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `repeater_rate`.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key = value` lines for the header (calibrations, derived inputs).
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { name: name.into(), columns: columns.to_vec(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Run metadata shared by every file of one invocation.
#[derive(Debug, Clone)]
pub struct Provenance<'a> {
    pub command: String,
    pub config: &'a ScenarioConfig,
}

pub fn render(table: &Table, prov: &Provenance<'_>, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table, prov),
        Format::Json => render_json(table, prov),
    }
}

fn render_csv(table: &Table, prov: &Provenance<'_>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qrep {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command = {}", prov.command);
    let seed = prov.config.seed().map_or("unset".to_string(), |s| s.to_string());
    let _ = writeln!(out, "# seed = {seed}");
    for (k, v) in prov.config.resolved() {
        let _ = writeln!(out, "# {k} = {v}");
    }
    for (k, v) in &table.notes {
        let _ = writeln!(out, "# note.{k} = {v}");
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(table: &Table, prov: &Provenance<'_>) -> String {
    let config: Map<String, Json> = prov.config.resolved().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let notes: Map<String, Json> = table.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let rows: Vec<Json> = table
        .rows
        .iter()
        .map(|r| Json::Object(table.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
        .collect();
    let doc = json!({
        "header": {
            "version": env!("CARGO_PKG_VERSION"),
            "command": prov.command,
            "seed": prov.config.seed(),
            "config": config,
            "notes": notes,
        },
        "columns": table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serialisable");
    s.push('\n');
    s
}
