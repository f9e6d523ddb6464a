//! File helpers shared by the commands.

use std::fs;
use std::io::Write;
use std::path::Path;

use rotorsim::Scenario;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    Ok(Scenario::from_json(&read_text(path)?)?)
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes equal-length columns under `header`, optionally preceded by `#`
/// comment lines.
pub fn write_columns(path: &Path, comments: &[&str], header: &[String], columns: &[&[f64]]) -> CliResult<()> {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    for line in comments {
        writeln!(file, "# {line}").map_err(|e| CliError::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let fail = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(header).map_err(fail)?;
    let mut record = Vec::with_capacity(columns.len());
    for i in 0..rows {
        record.clear();
        record.extend(columns.iter().map(|c| c[i].to_string()));
        w.write_record(&record).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Header and numeric columns of a CSV file; `#` lines are skipped.
pub fn read_columns(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::input(path, e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(path, e.to_string()))?;
        for (c, field) in record.iter().enumerate() {
            let value = field.trim().parse::<f64>().map_err(|_| {
                CliError::input(path, format!("row {}: `{field}` in column `{}` is not a number", row + 1, header[c]))
            })?;
            columns[c].push(value);
        }
    }
    Ok((header, columns))
}
