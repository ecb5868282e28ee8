//! Table files and the run manifest.

use std::path::{Path, PathBuf};

use gpdephase_core::SweepTable;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: PathBuf,
    pub role: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Summary of one run, printed to stdout as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub files: Vec<FileEntry>,
    pub wall_time_seconds: f64,
    pub points: usize,
    /// Grid points whose evaluation failed (written as `nan`/`null`).
    pub failed_points: usize,
    /// Non-finite entries in the table, including failed points.
    pub non_finite_values: usize,
    pub parameters: serde_json::Value,
}

impl Manifest {
    pub fn total_failure(&self) -> bool {
        self.points > 0 && self.failed_points == self.points
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, role: &str, contents: &str) -> Result<FileEntry> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(FileEntry {
        path: path.to_path_buf(),
        role: role.to_string(),
        sha256: sha256_hex(contents.as_bytes()),
        bytes: contents.len() as u64,
    })
}

pub fn render_table(table: &SweepTable, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    })
}

pub fn write_table(table: &SweepTable, format: Format, path: &Path) -> Result<FileEntry> {
    write_file(path, "table", &render_table(table, format)?)
}

pub fn read_table(path: &Path) -> Result<SweepTable> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed =
        if path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{') {
            SweepTable::from_json(&text)
        } else {
            SweepTable::from_csv(&text)
        };
    parsed.map_err(|e| CliError::Table {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Re-read every file, compare hashes and sizes, and check that tables parse.
pub fn verify_manifest(manifest: &Manifest) -> Result<()> {
    for f in &manifest.files {
        let bytes = std::fs::read(&f.path).map_err(|source| CliError::Io {
            path: f.path.clone(),
            source,
        })?;
        if bytes.len() as u64 != f.bytes || sha256_hex(&bytes) != f.sha256 {
            return Err(CliError::Verification(format!(
                "{} does not match its recorded hash",
                f.path.display()
            )));
        }
        if f.role == "table" {
            let table = read_table(&f.path)?;
            if table.points() != manifest.points {
                return Err(CliError::Verification(format!(
                    "{} holds {} points, expected {}",
                    f.path.display(),
                    table.points(),
                    manifest.points
                )));
            }
        }
    }
    Ok(())
}
