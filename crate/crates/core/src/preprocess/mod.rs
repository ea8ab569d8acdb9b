//! Gauge data preprocessing: discharge screening, completeness checks,
//! bypass of failed stations and Z-score normalization.

mod bypass;
pub mod io;
mod qc;
mod zscore;

pub use bypass::{bypass_remove, extract_subgraph};
pub use qc::{check_completeness, quality_control, screen_discharge, GaugeSeries, QCReport, StudyPeriod};
pub use zscore::{zscore, zscore_values, FeatureStats, NormStats, DISCHARGE};

use thiserror::Error;

use crate::graph::{GraphError, StationId};

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("study period must start before it ends")]
    InvalidPeriod,
    #[error("series for station {station}: channel `{channel}` has {len} values, expected {expected}")]
    LengthMismatch {
        station: StationId,
        channel: String,
        len: usize,
        expected: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
