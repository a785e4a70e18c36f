use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labcli::config::Settings;

/// One CSV file held in memory until the writer flushes it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// CSV body (header and rows), RFC 4180 quoting.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Domain(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Float cell: shortest round-trip scientific notation, `inf`/`-inf`/`nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:e}")
    }
}

/// Optional float cell; `None` becomes an empty field.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn int<T: std::fmt::Display>(v: T) -> String {
    v.to_string()
}

pub fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_file: Option<String>,
    pub config_sha256: String,
    pub seed: u64,
    pub settings: serde_json::Value,
    pub files: Vec<FileRecord>,
    pub notes: Vec<String>,
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes tables into the output directory one at a time and records them for the manifest.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    header_line: String,
    manifest: Manifest,
}

impl RunWriter {
    pub fn create(settings: &Settings, config_file: Option<&Path>) -> Result<Self> {
        std::fs::create_dir_all(&settings.out).map_err(|e| Error::io(&settings.out, e))?;
        let sha = settings.sha256();
        let mut header_line = format!(
            "# qlrlab {} command={} config_sha256={} seed={}",
            env!("CARGO_PKG_VERSION"),
            settings.command,
            sha,
            settings.seed
        );
        if let Some(eps) = settings.solver.regularize {
            header_line.push_str(&format!(" REGULARIZED sigma+={eps:e}*I"));
        }
        header_line.push('\n');
        let settings_json = serde_json::to_value(settings)?;
        Ok(Self {
            dir: settings.out.clone(),
            header_line,
            manifest: Manifest {
                tool: "qlrlab",
                version: env!("CARGO_PKG_VERSION"),
                command: settings.command.to_string(),
                config_file: config_file.map(|p| p.display().to_string()),
                config_sha256: sha,
                seed: settings.seed,
                settings: settings_json,
                files: Vec::new(),
                notes: settings
                    .solver
                    .regularize
                    .map(|eps| {
                        format!("REGULARIZED: {eps:e}*I added to the metric before every solve")
                    })
                    .into_iter()
                    .collect(),
            },
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, table: &Table) -> Result<()> {
        let text = format!("{}{}", self.header_line, table.to_csv()?);
        let path = self.dir.join(&table.name);
        std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
        self.manifest.files.push(FileRecord {
            name: table.name.clone(),
            rows: table.rows.len(),
            sha256: hex_sha256(text.as_bytes()),
        });
        Ok(())
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.manifest.notes.push(note.into());
    }

    /// Writes `manifest.json` and returns the manifest.
    pub fn finish(self) -> Result<Manifest> {
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}

/// Reads a CSV written by [`RunWriter`], skipping `#` comment lines.
pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let body: String = text
        .split_inclusive('\n')
        .filter(|l| !l.starts_with('#'))
        .collect();
    let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(Table {
        name: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        header,
        rows,
    })
}
