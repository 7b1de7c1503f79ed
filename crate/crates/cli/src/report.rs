//! Command reports and their text, JSON and CSV renderings.

use crate::config::{Format, RunConfig};
use serde_json::{Map, Value};
use std::time::Duration;

/// A results table: header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }
}

/// What a subcommand produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: Vec<String>,
    pub config: RunConfig,
    /// Top-level JSON fields besides `command` and `config`.
    pub fields: Map<String, Value>,
    /// Rows for text and CSV output.
    pub table: Table,
    /// Extra lines printed after the table in text mode.
    pub notes: Vec<String>,
    /// False when a validation inside the command failed.
    pub ok: bool,
    /// Render as CSV unless JSON was asked for (table dumps).
    pub csv_default: bool,
    pub wall_time: Duration,
}

impl Report {
    pub fn new(command: Vec<String>, config: RunConfig) -> Report {
        Report {
            command,
            config,
            fields: Map::new(),
            table: Table::default(),
            notes: Vec::new(),
            ok: true,
            csv_default: false,
            wall_time: Duration::ZERO,
        }
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    /// JSON keys are sorted and the wall time is left out, so equal configs give
    /// byte-identical output.
    pub fn to_json(&self) -> String {
        let mut map = self.fields.clone();
        map.insert("command".into(), Value::from(self.command.clone()));
        map.insert("config".into(), self.config.to_json());
        map.insert("ok".into(), Value::from(self.ok));
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header).expect("write to memory");
        for row in &self.table.rows {
            w.write_record(row).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV of UTF-8 cells")
    }

    pub fn to_text(&self) -> String {
        let t = &self.table;
        let cols = t.header.len();
        let mut width = vec![0; cols];
        for row in std::iter::once(&t.header).chain(&t.rows) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&t.header).chain(&t.rows) {
            let cells: Vec<String> =
                row.iter().zip(&width).enumerate().map(|(k, (c, w))| if k + 1 == cols { c.clone() } else { format!("{c:<w$}") }).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out.push_str(&format!("# wall time {:.3} s\n", self.wall_time.as_secs_f64()));
        out
    }

    pub fn render(&self, format: Format) -> String {
        let format = if self.csv_default && format == Format::Text { Format::Csv } else { format };
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(vec!["qmark".into(), "fixed".into()], RunConfig::default());
        r.table = Table::new(&["name", "value"]);
        r.table.push(["a,b", "1"]);
        r.field("zeta", 1);
        r.field("alpha", "x");
        r
    }

    #[test]
    fn json_is_sorted_and_timeless() {
        let mut r = sample();
        let a = r.to_json();
        r.wall_time = Duration::from_secs(3);
        assert_eq!(a, r.to_json());
        assert!(a.find("\"alpha\"").unwrap() < a.find("\"zeta\"").unwrap());
        assert!(!a.contains("wall"));
    }

    #[test]
    fn csv_quotes_cells() {
        assert_eq!(sample().to_csv(), "name,value\n\"a,b\",1\n");
    }

    #[test]
    fn text_aligns_columns() {
        let t = sample().to_text();
        assert!(t.starts_with("name  value\na,b   1\n"), "{t}");
    }
}
