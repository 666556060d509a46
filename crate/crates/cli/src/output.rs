use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Schema marker written as the first line of every CSV file.
pub const CSV_HEADER: &str = "# tempograd-csv v1";

/// Write via a sibling temporary file and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| {
                CliError::Runtime(format!("cannot create {}: {e}", dir.display()))
            })?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// CSV text with an explicit header row, so empty tables keep their schema.
pub fn csv_string<T: Serialize>(columns: &[&str], rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(format!("{CSV_HEADER}\n{}", String::from_utf8_lossy(&bytes)))
}

pub fn write_csv<T: Serialize>(path: &Path, columns: &[&str], rows: &[T]) -> Result<(), CliError> {
    write_atomic(path, csv_string(columns, rows)?.as_bytes())
}
