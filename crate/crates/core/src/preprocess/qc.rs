use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use super::PreprocessError;
use crate::graph::StationId;

/// Hourly discharge record of one gauge.
///
/// Missing observations are stored as NaN. Timestamps are kept in file
/// order so that completeness checks can detect duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSeries {
    pub station: StationId,
    pub timestamps: Vec<DateTime<Utc>>,
    /// m³/s
    pub discharge: Vec<f64>,
    pub features: BTreeMap<String, Vec<f64>>,
}

impl GaugeSeries {
    pub fn new(
        station: StationId,
        timestamps: Vec<DateTime<Utc>>,
        discharge: Vec<f64>,
        features: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, PreprocessError> {
        let expected = timestamps.len();
        let channels = std::iter::once(("discharge", &discharge)).chain(features.iter().map(|(k, v)| (k.as_str(), v)));
        for (name, values) in channels {
            if values.len() != expected {
                return Err(PreprocessError::LengthMismatch {
                    station,
                    channel: name.to_string(),
                    len: values.len(),
                    expected,
                });
            }
        }
        Ok(Self {
            station,
            timestamps,
            discharge,
            features,
        })
    }

    /// Hourly series starting at `start` with no extra channels.
    pub fn hourly(station: StationId, start: DateTime<Utc>, discharge: Vec<f64>) -> Self {
        let timestamps = (0..discharge.len())
            .map(|k| start + Duration::hours(k as i64))
            .collect();
        Self {
            station,
            timestamps,
            discharge,
            features: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Half-open interval `[start, end)` of hourly slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyPeriod {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl StudyPeriod {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, PreprocessError> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(PreprocessError::InvalidPeriod)
        }
    }

    /// Number of hourly slots, counting a trailing partial hour.
    pub fn hours(&self) -> u64 {
        let secs = (self.end - self.start).num_seconds() as u64;
        secs.div_ceil(3600)
    }

    /// Slot index of `t`, if it lies on the hourly grid inside the period.
    pub fn slot(&self, t: DateTime<Utc>) -> Option<u64> {
        if t < self.start || t >= self.end {
            return None;
        }
        let offset = t - self.start;
        if offset.subsec_nanos() != 0 || offset.num_seconds() % 3600 != 0 {
            return None;
        }
        Some(offset.num_seconds() as u64 / 3600)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCReport {
    pub station: StationId,
    pub negative_count: u64,
    pub missing_hours: u64,
    pub passed: bool,
}

impl QCReport {
    fn new(station: StationId, negative_count: u64, missing_hours: u64) -> Self {
        Self {
            station,
            negative_count,
            missing_hours,
            passed: negative_count == 0 && missing_hours == 0,
        }
    }

    /// Joins the screening and completeness results for one station.
    pub fn combine(&self, other: &QCReport) -> QCReport {
        QCReport::new(
            self.station,
            self.negative_count.max(other.negative_count),
            self.missing_hours.max(other.missing_hours),
        )
    }
}

/// Flags strictly negative discharge values. An empty series fails with
/// the whole period missing.
pub fn screen_discharge(series: &GaugeSeries, period: &StudyPeriod) -> QCReport {
    let negative = series.discharge.iter().filter(|&&q| q < 0.0).count() as u64;
    let missing = if series.is_empty() { period.hours() } else { 0 };
    QCReport::new(series.station, negative, missing)
}

/// Counts hourly slots of `period` without a finite observation.
///
/// Every timestamp that does not strictly follow its predecessor (a
/// duplicate or a step backwards) adds one more missing hour, so such a
/// series never passes.
pub fn check_completeness(series: &GaugeSeries, period: &StudyPeriod) -> QCReport {
    let expected = period.hours();
    let mut present = HashSet::new();
    for (t, q) in series.timestamps.iter().zip(&series.discharge) {
        if q.is_finite() {
            if let Some(slot) = period.slot(*t) {
                present.insert(slot);
            }
        }
    }
    let order_violations = series.timestamps.windows(2).filter(|w| w[1] <= w[0]).count() as u64;
    QCReport::new(series.station, 0, expected - present.len() as u64 + order_violations)
}

/// Screening and completeness in one report.
pub fn quality_control(series: &GaugeSeries, period: &StudyPeriod) -> QCReport {
    screen_discharge(series, period).combine(&check_completeness(series, period))
}
