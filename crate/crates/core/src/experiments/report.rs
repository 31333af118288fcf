//! Tables, verdicts and the files a study writes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::StudyConfig;
use crate::mesh::MeshMetrics;
use crate::Result;

/// A CSV table with string cells. Numbers are formatted with `{:e}`-style
/// round-trip precision so identical runs give identical files.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Whitespace-separated copy with a commented header, for plotting tools.
    pub fn write_dat(&self, path: &Path) -> Result<()> {
        let mut s = format!("# {}\n", self.headers.join(" "));
        for r in &self.rows {
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        std::fs::write(path, s)?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }

    pub fn within(name: &str, value: f64, window: [f64; 2]) -> Self {
        Self::new(
            name,
            value >= window[0] && value <= window[1],
            format!("{value:.4} in [{}, {}]", window[0], window[1]),
        )
    }

    pub fn at_least(name: &str, value: f64, floor: f64) -> Self {
        Self::new(name, value >= floor, format!("{value:.4} >= {floor}"))
    }

    pub fn at_most(name: &str, value: f64, ceiling: f64) -> Self {
        Self::new(name, value <= ceiling, format!("{value:.6e} <= {ceiling:e}"))
    }
}

/// Everything a study produces.
#[derive(Debug, Clone, Serialize)]
pub struct StudyOutcome {
    pub study: String,
    pub config: StudyConfig,
    pub meshes: Vec<MeshMetrics>,
    #[serde(skip)]
    pub table: Table,
    pub verdicts: Vec<Verdict>,
    /// Study-specific numbers: slopes, fits, diagnostics.
    pub summary: serde_json::Value,
    /// Seconds per level.
    pub wall_times: Vec<f64>,
    /// Free-form caveats printed with the report.
    pub notes: Vec<String>,
}

impl StudyOutcome {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Writes `<study>.csv`, `<study>.dat` and `<study>.summary.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.study));
        let dat = dir.join(format!("{}.dat", self.study));
        let json = dir.join(format!("{}.summary.json", self.study));
        self.table.write_csv(&csv)?;
        self.table.write_dat(&dat)?;
        let mut value = serde_json::to_value(self)?;
        value["passed"] = serde_json::Value::Bool(self.passed());
        std::fs::write(&json, serde_json::to_string_pretty(&value)?)?;
        Ok(vec![csv, dat, json])
    }
}
