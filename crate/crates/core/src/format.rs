//! Errors shared by the file readers and writers.

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

impl FormatError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn invalid(path: &Path, message: impl Into<String>) -> Self {
        Self::Invalid {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    /// Maps a csv error onto `path:line`.
    pub(crate) fn csv(path: &Path, err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(source) => Self::io(path, source),
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Self::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("expected {expected_len} fields, found {len}"),
            },
            csv::ErrorKind::Utf8 { err, .. } => Self::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("invalid UTF-8: {err}"),
            },
            kind => Self::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("{kind:?}"),
            },
        }
    }
}

pub(crate) fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, FormatError> {
    let file = std::fs::File::open(path).map_err(|e| FormatError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, FormatError> {
    let file = std::fs::File::create(path).map_err(|e| FormatError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub(crate) fn header_index(path: &Path, headers: &csv::StringRecord, column: &str) -> Result<usize, FormatError> {
    headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| FormatError::MissingColumn {
            path: path.to_path_buf(),
            column: column.to_string(),
        })
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    idx: usize,
    column: &str,
) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    let raw = record.get(idx).ok_or_else(|| FormatError::Malformed {
        path: path.to_path_buf(),
        line,
        message: format!("missing field `{column}`"),
    })?;
    raw.parse().map_err(|e: T::Err| FormatError::Malformed {
        path: path.to_path_buf(),
        line,
        message: format!("bad `{column}` value {raw:?}: {e}"),
    })
}

pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| FormatError::invalid(path, e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| FormatError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Malformed {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}
