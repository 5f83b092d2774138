use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "focklab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Float(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Flat table for plotting, written as the CSV body.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Result of one experiment: the full record for JSON and a table for CSV.
pub struct Report {
    pub result: Value,
    pub table: Table,
}

impl Report {
    pub fn new(result: impl Serialize, table: Table) -> Self {
        Report {
            result: serde_json::to_value(result).expect("result serializes"),
            table,
        }
    }
}

pub fn render_json(config: &Value, hash: &str, report: &Report) -> String {
    let doc = serde_json::json!({
        "tool": TOOL,
        "version": VERSION,
        "config_hash": hash,
        "config": config,
        "result": report.result,
    });
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}

pub fn render_csv(config: &Value, hash: &str, report: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "# {TOOL} {VERSION}").unwrap();
    writeln!(s, "# config_hash: {hash}").unwrap();
    writeln!(s, "# config: {config}").unwrap();
    writeln!(s, "{}", report.table.columns.join(",")).unwrap();
    for row in &report.table.rows {
        let line: Vec<String> = row.iter().map(Cell::to_string).collect();
        writeln!(s, "{}", line.join(",")).unwrap();
    }
    s
}
