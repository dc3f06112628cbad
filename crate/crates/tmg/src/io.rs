//! Sample CSVs, JSON documents and atomic file writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::runtime(format!("cannot create a file in {}: {e}", dir.display())))?;
    tmp.write_all(contents).map_err(|e| CliError::runtime(format!("write failed: {e}")))?;
    tmp.as_file().sync_all().map_err(|e| CliError::runtime(format!("sync failed: {e}")))?;
    tmp.persist(path).map_err(|e| CliError::runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Renders samples as CSV: a header of column names, then one row per
/// sample. Floats use the shortest representation that parses back to the
/// same value.
pub fn samples_csv<'a>(columns: &[String], rows: impl IntoIterator<Item = &'a [f64]>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(CliError::runtime)?;
    let mut fmt = ryu::Buffer::new();
    let mut buf: Vec<String> = Vec::with_capacity(columns.len());
    for row in rows {
        if row.len() != columns.len() {
            return Err(CliError::runtime(format!("row has {} values for {} columns", row.len(), columns.len())));
        }
        buf.clear();
        buf.extend(row.iter().map(|v| format_float(&mut fmt, *v)));
        w.write_record(&buf).map_err(CliError::runtime)?;
    }
    w.into_inner().map_err(|e| CliError::runtime(e.to_string()))
}

fn format_float(fmt: &mut ryu::Buffer, v: f64) -> String {
    if v.is_finite() {
        fmt.format_finite(v).to_owned()
    } else {
        v.to_string()
    }
}

/// Column-major contents of a samples CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn n_rows(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> CliResult<&[f64]> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::config(format!("no column named {name:?}")))?;
        Ok(&self.values[j])
    }
}

pub fn parse_samples_csv(text: &str) -> CliResult<SampleTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let columns: Vec<String> = r.headers().map_err(|e| CliError::config(format!("malformed CSV header: {e}")))?.iter().map(String::from).collect();
    if columns.is_empty() {
        return Err(CliError::config("CSV has no columns"));
    }
    let mut values = vec![Vec::new(); columns.len()];
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::config(format!("malformed CSV row {}: {e}", i + 1)))?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::config(format!("row {}, column {}: {field:?} is not a number", i + 1, columns[j])))?;
            values[j].push(v);
        }
    }
    Ok(SampleTable { columns, values })
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

pub fn read_samples_csv(path: &Path) -> CliResult<SampleTable> {
    parse_samples_csv(&read_to_string(path)?)
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

/// `samples.csv` → `samples.manifest.json`
pub fn default_manifest_path(samples: &Path) -> PathBuf {
    samples.with_extension("manifest.json")
}
