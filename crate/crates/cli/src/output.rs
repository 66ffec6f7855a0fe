//! Deterministic file output. Everything is written to a sibling temporary
//! file and renamed into place.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;
use crate::experiments::ResultRow;

/// 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    write_atomic(path, &csv_bytes(header, rows)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(cylq_core::Error::from)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub const RESULT_HEADER: [&str; 7] = ["experiment", "case", "param", "value", "relation", "bound", "pass"];

pub fn result_record(r: &ResultRow) -> Vec<String> {
    vec![
        r.experiment.clone(),
        r.case.clone(),
        float(r.param),
        float(r.value),
        r.relation.symbol().to_string(),
        float(r.bound),
        r.pass.to_string(),
    ]
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub pass: bool,
    /// Value of the row closest to (or furthest past) its bound.
    pub worst_value: Option<f64>,
    pub worst_case: Option<String>,
    pub rows: usize,
}

pub fn worst(rows: &[ResultRow]) -> Option<&ResultRow> {
    rows.iter()
        .filter(|r| r.relation != crate::experiments::Relation::Record)
        .fold(None, |acc: Option<&ResultRow>, r| match acc {
            Some(a) if !(r.severity() > a.severity() || (!r.pass && a.pass)) => Some(a),
            _ => Some(r),
        })
}

pub fn summary(experiment: &str, rows: &[ResultRow]) -> Summary {
    let w = worst(rows);
    Summary {
        experiment: experiment.to_string(),
        pass: rows.iter().all(|r| r.pass),
        worst_value: w.map(|r| r.value),
        worst_case: w.map(|r| r.case.clone()),
        rows: rows.len(),
    }
}
