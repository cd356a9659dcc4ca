use crate::error::{CliError, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Build identifier baked in at compile time (`git describe`, or "unknown").
pub const BUILD_ID: &str = env!("DULAB_BUILD_ID");

/// Scientific notation with 17 significant digits; round-trips every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table held in memory until every job has finished.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &'static [&'static str]) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Provenance written next to every set of tables.
#[derive(Debug, Serialize)]
pub struct ResultRecord<M: Serialize> {
    pub command: &'static str,
    pub build: &'static str,
    pub wall_time_seconds: f64,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub metadata: M,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })
}

pub fn write_table(dir: &Path, table: &Table) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join(&table.name);
    let wrap = |source| CliError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(wrap)?;
    w.write_record(table.header).map_err(wrap)?;
    for row in &table.rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.clone(),
        source,
    })?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes all tables, then the record listing them.
pub fn persist<M: Serialize>(
    dir: &Path,
    record_name: &str,
    tables: &[Table],
    mut record: ResultRecord<M>,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(tables.len() + 1);
    for t in tables {
        written.push(write_table(dir, t)?);
    }
    record.files.extend(tables.iter().map(|t| t.name.clone()));
    written.push(write_json(dir, record_name, &record)?);
    Ok(written)
}
