//! Gauge discharge files and QC report output.
//!
//! One CSV per station, `timestamp,qobs` by default, with ISO-8601 UTC
//! timestamps. Column names can be remapped through a TOML table:
//!
//! ```toml
//! [column_map]
//! timestamp = "time"
//! discharge = "Q"
//! ```
//!
//! Any further numeric columns become named feature channels. Empty cells
//! are read as missing (NaN).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{GaugeSeries, QCReport};
use crate::format::{csv_reader, header_index, write_json, FormatError};
use crate::graph::StationId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub timestamp: String,
    pub discharge: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            discharge: "qobs".into(),
        }
    }
}

pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
}

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Station identifier from a file name: the trailing run of digits in the
/// stem, so `ID_123.csv` and `123.csv` both map to 123.
pub fn station_from_path(path: &Path) -> Option<StationId> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    digits.chars().rev().collect::<String>().parse().ok()
}

pub fn read_gauge_csv(path: &Path, station: StationId, columns: &ColumnMap) -> Result<GaugeSeries, FormatError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| FormatError::csv(path, e))?.clone();
    let t_col = header_index(path, &headers, &columns.timestamp)?;
    let q_col = header_index(path, &headers, &columns.discharge)?;
    let extra: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != t_col && i != q_col)
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut timestamps = Vec::new();
    let mut discharge = Vec::new();
    let mut features: BTreeMap<String, Vec<f64>> = extra.iter().map(|(_, h)| (h.clone(), Vec::new())).collect();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| FormatError::csv(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |message: String| FormatError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        let raw_t = rec.get(t_col).unwrap_or("");
        let t = parse_timestamp(raw_t).ok_or_else(|| malformed(format!("bad timestamp {raw_t:?}")))?;
        timestamps.push(t);
        let number = |idx: usize, name: &str| -> Result<f64, FormatError> {
            match rec.get(idx).unwrap_or("") {
                "" | "NaN" | "nan" | "NA" => Ok(f64::NAN),
                raw => raw
                    .parse()
                    .map_err(|_| malformed(format!("bad `{name}` value {raw:?}"))),
            }
        };
        discharge.push(number(q_col, &columns.discharge)?);
        for (idx, name) in &extra {
            let x = number(*idx, name)?;
            features.get_mut(name).expect("feature column").push(x);
        }
    }
    GaugeSeries::new(station, timestamps, discharge, features).map_err(|e| FormatError::invalid(path, e.to_string()))
}

/// Reads every `*.csv` in `dir` whose name carries a station id, sorted by
/// station.
pub fn read_gauge_dir(dir: &Path, columns: &ColumnMap) -> Result<Vec<GaugeSeries>, FormatError> {
    let entries = std::fs::read_dir(dir).map_err(|e| FormatError::io(dir, e))?;
    let mut files: Vec<(StationId, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| FormatError::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        match station_from_path(&path) {
            Some(id) => files.push((id, path)),
            None => log::warn!("skipping {}: no station id in file name", path.display()),
        }
    }
    files.sort();
    if let Some(w) = files.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(FormatError::invalid(dir, format!("two files for station {}", w[0].0)));
    }
    files
        .iter()
        .map(|(id, path)| read_gauge_csv(path, *id, columns))
        .collect()
}

pub fn write_gauge_csv(path: &Path, series: &GaugeSeries) -> Result<(), FormatError> {
    let mut w = crate::format::csv_writer(path)?;
    let mut header = vec!["timestamp".to_string(), "qobs".to_string()];
    header.extend(series.features.keys().cloned());
    w.write_record(&header).map_err(|e| FormatError::csv(path, e))?;
    for (k, t) in series.timestamps.iter().enumerate() {
        let mut row = vec![format_timestamp(t), series.discharge[k].to_string()];
        row.extend(series.features.values().map(|v| v[k].to_string()));
        w.write_record(&row).map_err(|e| FormatError::csv(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}

pub fn write_qc_reports(path: &Path, reports: &[QCReport]) -> Result<(), FormatError> {
    write_json(path, reports)
}
