//! Output files. Every CSV starts with a `# config_hash=` comment line, then
//! a header row. Numbers are written in Rust's shortest round-trip form so
//! reruns give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// A run directory plus the hash stamped into its files.
#[derive(Clone, Debug)]
pub struct RunDir {
    pub path: PathBuf,
    pub hash: String,
}

impl RunDir {
    pub fn create(path: &Path, hash: &str) -> Result<Self> {
        fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
        Ok(RunDir { path: path.to_path_buf(), hash: hash.to_string() })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        write_atomic(&self.file(name), text.as_bytes())
    }

    pub fn write_csv(&self, name: &str, table: &Table) -> Result<()> {
        write_atomic(&self.file(name), &table.render(&self.hash)?)
    }
}

/// Writes through a temporary sibling and a rename, so a reader never sees a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// An in-memory CSV table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, hash: &str) -> Result<Vec<u8>> {
        let mut out = format!("# config_hash={hash}\n").into_bytes();
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Serde(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        out.extend(w.into_inner().map_err(|e| Error::Serde(e.to_string()))?);
        Ok(out)
    }

    /// Parses a file written by [`Table::render`], returning the hash too.
    pub fn parse(text: &str) -> Result<(String, Table)> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let hash = first
            .strip_prefix("# config_hash=")
            .ok_or_else(|| Error::Data("CSV lacks the config_hash line".into()))?
            .to_string();
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        let err = |e: csv::Error| Error::Data(e.to_string());
        let header = r.headers().map_err(err)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()).map_err(err))
            .collect::<Result<_>>()?;
        Ok((hash, Table { header, rows }))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Formats a float for CSV output.
pub fn num(v: f64) -> String {
    format!("{v}")
}
