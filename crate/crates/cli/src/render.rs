//! JSON and CSV rendering of command results.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Json,
    Csv,
}

/// A rendered command result. `table` overrides the default CSV form, which
/// is the scalar fields of the JSON document as a single row.
pub struct Report {
    pub document: Value,
    pub table: Option<Table>,
    pub warnings: Vec<String>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

impl Report {
    pub fn new(value: &impl Serialize, warnings: Vec<String>) -> Self {
        Report {
            document: serde_json::to_value(value).expect("results serialize"),
            table: None,
            warnings,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(&self, mode: OutputMode) -> String {
        match mode {
            OutputMode::Json => self.json(),
            OutputMode::Csv => self.csv(),
        }
    }

    fn json(&self) -> String {
        let mut doc = self.document.clone();
        if !self.warnings.is_empty() {
            if let Value::Object(map) = &mut doc {
                map.insert("warnings".into(), self.warnings.clone().into());
            }
        }
        let mut out = serde_json::to_string_pretty(&doc).expect("json");
        out.push('\n');
        out
    }

    fn csv(&self) -> String {
        let table = match &self.table {
            Some(t) => t,
            None => &scalar_row(&self.document),
        };
        let mut out = String::new();
        out.push_str(&table.header.join(","));
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str("# warning: ");
            out.push_str(w);
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip form, with an exponent for very large or small
/// magnitudes (same as the JSON output).
pub fn cell(v: f64) -> String {
    match serde_json::Number::from_f64(v) {
        Some(num) => num.to_string(),
        None => v.to_string(),
    }
}

fn scalar_row(doc: &Value) -> Table {
    let mut table = Table::new(&[]);
    let mut row = Vec::new();
    if let Value::Object(map) = doc {
        flatten("", map, &mut table.header, &mut row);
    }
    table.push(row);
    table
}

fn flatten(prefix: &str, map: &Map<String, Value>, header: &mut Vec<String>, row: &mut Vec<String>) {
    for (key, value) in map {
        let name = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}_{key}")
        };
        match value {
            Value::Object(inner) => flatten(&name, inner, header, row),
            Value::Array(_) => {}
            Value::String(s) => {
                header.push(name);
                row.push(s.clone());
            }
            Value::Null => {
                header.push(name);
                row.push(String::new());
            }
            other => {
                header.push(name);
                row.push(other.to_string());
            }
        }
    }
}
