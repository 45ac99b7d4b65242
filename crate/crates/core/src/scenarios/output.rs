//! Result tables, the output manifest and the single writer that persists
//! them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::EvolveDiagnostics;
use crate::{Error, Result};

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Flag(bool),
}

impl Cell {
    /// Text form: reals with 17 significant digits (exact round trip),
    /// flags as `0`/`1`.
    pub fn render(&self) -> String {
        match self {
            Cell::Real(x) => format!("{x:.16e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Real(x) => x,
            Cell::Int(k) => k as f64,
            Cell::Flag(b) => f64::from(u8::from(b)),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(k: i64) -> Self {
        Cell::Int(k)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

/// A named table destined for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File name relative to the output directory.
    pub file: String,
    /// Semantic kind recorded in the manifest (e.g. `trace`).
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: impl Into<String>, kind: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            file: file.into(),
            kind: kind.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; panics if its width differs from the header (a
    /// programming error in a scenario driver).
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of {}", self.file);
        self.rows.push(row);
    }

    /// Values of one column as reals.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    /// Table with one row per sample from parallel columns.
    pub fn from_columns(file: &str, kind: &str, columns: &[(&str, &[f64])]) -> Self {
        let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
        let mut t = Table::new(file, kind, &names);
        let len = columns.first().map_or(0, |c| c.1.len());
        for i in 0..len {
            t.push(columns.iter().map(|c| Cell::Real(c.1[i])).collect());
        }
        t
    }

    fn write(&self, path: &Path) -> Result<()> {
        let err = |source| Error::Csv { path: path.display().to_string(), source };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(err)?;
        }
        w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })
    }
}

/// One manifest entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the manifest.
    pub path: String,
    /// `trace`, `table`, `spectrum`, `sweep`, `matrix` or `summary`.
    pub kind: String,
    /// CSV header; empty for JSON files.
    pub columns: Vec<String>,
}

/// Stream of one disorder realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationSeed {
    pub index: usize,
    pub seed: u64,
    /// ChaCha20 stream selected for this realization.
    pub stream: u64,
}

/// Numerical health of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// Merged integrator diagnostics over all trajectories (or the worst
    /// steady-state checks), when the scenario evolves density matrices.
    pub evolution: Option<EvolveDiagnostics>,
    /// Disorder streams, one per averaged realization.
    pub realization_seeds: Vec<RealizationSeed>,
}

/// Code version and timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub wall_time_seconds: f64,
}

/// The JSON manifest `{config, files, diagnostics, provenance}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
    pub diagnostics: RunDiagnostics,
    pub provenance: Provenance,
}

/// File name of the manifest inside an output directory.
pub const MANIFEST_FILE: &str = "manifest.json";
/// File name of the scenario summary inside an output directory.
pub const SUMMARY_FILE: &str = "summary.json";

/// Write all tables, the summary and the manifest, sequentially, and return
/// the manifest entries.
pub(crate) fn write_outputs(
    dir: &Path,
    tables: &[Table],
    summary: &serde_json::Value,
    manifest: impl FnOnce(Vec<FileEntry>) -> Manifest,
) -> Result<Manifest> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let mut files = Vec::with_capacity(tables.len() + 1);
    for t in tables {
        t.write(&dir.join(&t.file))?;
        files.push(FileEntry { path: t.file.clone(), kind: t.kind.clone(), columns: t.columns.clone() });
    }
    write_json(&dir.join(SUMMARY_FILE), summary)?;
    files.push(FileEntry { path: SUMMARY_FILE.into(), kind: "summary".into(), columns: Vec::new() });
    let manifest = manifest(files);
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.display().to_string(), source })
}
