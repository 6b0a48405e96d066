//! CSV ingestion into a [`SurvivalDataset`].

use std::fs::File;
use std::io::Read;
use std::path::Path;

use survival_explain::{Matrix, SurvivalDataset};

use crate::error::{CliError, CliResult};

/// Read `path`; every column other than the time and event columns becomes a feature.
pub fn ingest_csv(path: &Path, time_col: &str, event_col: &str) -> CliResult<SurvivalDataset> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::io(path, e))?;
    parse_csv(&text, time_col, event_col).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parse CSV text with a header row. Rows in messages are 1-based data rows.
pub fn parse_csv(text: &str, time_col: &str, event_col: &str) -> CliResult<SurvivalDataset> {
    if time_col == event_col {
        return Err(CliError::input(format!(
            "time and event columns must differ (both '{time_col}')"
        )));
    }
    if text.trim().is_empty() {
        return Err(CliError::input("CSV file is empty"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("cannot read CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::input(format!(
                "column '{name}' not found in header (columns: {})",
                header.join(", ")
            ))
        })
    };
    let time_idx = find(time_col)?;
    let event_idx = find(event_col)?;
    let feature_idx: Vec<usize> = (0..header.len())
        .filter(|i| *i != time_idx && *i != event_idx)
        .collect();

    let mut times = Vec::new();
    let mut events = Vec::new();
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record =
            record.map_err(|e| CliError::input(format!("malformed CSV at row {row}: {e}")))?;
        let cell = |i: usize| -> CliResult<f64> {
            let raw = record.get(i).unwrap_or("");
            if raw.is_empty() {
                return Err(CliError::input(format!(
                    "missing value at row {row}, column '{}'",
                    header[i]
                )));
            }
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::input(format!(
                        "non-numeric value '{raw}' at row {row}, column '{}'",
                        header[i]
                    ))
                })
        };
        let t = cell(time_idx)?;
        if t < 0.0 {
            return Err(CliError::input(format!("negative time {t} at row {row}")));
        }
        let event = match record.get(event_idx).unwrap_or("").parse::<f64>() {
            Ok(0.0) => false,
            Ok(1.0) => true,
            _ => {
                return Err(CliError::input(format!(
                    "event column must be 0/1 (row {row})"
                )))
            }
        };
        times.push(t);
        events.push(event);
        rows.push(
            feature_idx
                .iter()
                .map(|&i| cell(i))
                .collect::<CliResult<Vec<f64>>>()?,
        );
    }
    if times.is_empty() {
        return Err(CliError::input("CSV file has a header but no data rows"));
    }
    let names: Vec<String> = feature_idx.iter().map(|&i| header[i].clone()).collect();
    let features = Matrix::from_rows(&rows)?;
    Ok(SurvivalDataset::new(times, events, features, names)?)
}
