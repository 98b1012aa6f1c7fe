//! CSV time series with a `#` provenance header and a JSON footer line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::TOOL_VERSION;
use crate::error::LabError;

pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header comments carry the tool version and the config hash; `footer`
    /// is appended as a final `# {json}` line.
    pub fn render(&self, config_hash: &str, footer: Option<&serde_json::Value>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# fraclab {TOOL_VERSION}");
        let _ = writeln!(out, "# config_hash {config_hash}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        if let Some(f) = footer {
            let _ = writeln!(out, "# {f}");
        }
        out
    }
}

/// Reads the named column and `t` from a CSV written by [`CsvTable::render`];
/// comment lines are skipped.
pub fn read_column(path: &Path, column: &str) -> Result<(Vec<f64>, Vec<f64>), LabError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| LabError::Format("empty CSV".into()))?.split(',').collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| LabError::Format(format!("column '{name}' not found (have {})", header.join(","))))
    };
    let (it, ic) = (find("t")?, find(column)?);
    let (mut t, mut v) = (Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let parse = |i: usize| -> Result<f64, LabError> {
            cells
                .get(i)
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| LabError::Format(format!("bad number in data row {}", k + 1)))
        };
        t.push(parse(it)?);
        v.push(parse(ic)?);
    }
    Ok((t, v))
}
