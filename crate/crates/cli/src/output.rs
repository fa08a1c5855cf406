//! CSV and JSON writers. Every file starts with the resolved configuration.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Numeric table plus free-form summary values.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Table::default() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }
}

pub struct Report {
    pub table: Table,
    pub json: serde_json::Value,
    /// Set when a verification inside the command did not hold.
    pub failed: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    result: &'a serde_json::Value,
}

pub fn render(cfg: &RunConfig, report: &Report) -> String {
    match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope { config: cfg, result: &report.json })
                .expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv(cfg, &report.table),
    }
}

fn csv(cfg: &RunConfig, t: &Table) -> String {
    let mut s = String::new();
    for (k, v) in cfg.header() {
        let _ = writeln!(s, "# {k} = {v}");
    }
    for (k, v) in &t.notes {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "{}", t.columns.join(","));
    for r in &t.rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

/// Companion gnuplot script plotting every column against the first.
pub fn gnuplot(cfg: &RunConfig, t: &Table, data_path: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} (m = {}, a = {}, V = {})", cfg.subcommand, cfg.m, cfg.a, cfg.v);
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{}'", t.columns.first().copied().unwrap_or("x"));
    let plots: Vec<String> =
        (2..=t.columns.len()).map(|i| format!("'{data_path}' using 1:{i} with linespoints")).collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
