//! CSV artifacts. Each file opens with `#` comment lines naming the command
//! and embedding the resolved config, then a column header and data rows.
//! Files are written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Comment block shared by every file of one run.
#[derive(Debug, Clone)]
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str, config_json: &str) -> Self {
        Self {
            lines: vec![
                format!("reflectal {} {command}", env!("CARGO_PKG_VERSION")),
                format!("config = {config_json}"),
            ],
        }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

/// One table about to be written.
pub struct Table<'a> {
    pub header: &'a Header,
    /// Extra comment lines after the header, without the leading `#`.
    pub comments: Vec<String>,
    pub columns: &'a [&'a str],
    pub rows: Vec<Vec<String>>,
}

impl Table<'_> {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut buf = Vec::new();
        for line in self.header.lines().iter().chain(&self.comments) {
            writeln!(buf, "# {line}").expect("write to memory");
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let csv_err = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
            w.write_record(self.columns).map_err(csv_err)?;
            for row in &self.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        write_atomic(path, &buf)
    }
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = temporary_sibling(path);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn temporary_sibling(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp"))
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

/// Read the data rows of a file written by [`Table::write`], skipping comments.
pub fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let columns = r
        .headers()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok((columns, rows))
}
