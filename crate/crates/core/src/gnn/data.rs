use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use nalgebra::DMatrix;

use super::{ForecastTask, GnnError};
use crate::graph::StationId;
use crate::preprocess::{FeatureStats, GaugeSeries, NormStats, DISCHARGE};

/// One training or evaluation window.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// N × (alpha·C + static_dim); column `step·C + channel`, statics last.
    pub history: DMatrix<f64>,
    /// N × beta discharge targets.
    pub target: DMatrix<f64>,
    /// Row index of the first forecast hour.
    pub origin: usize,
}

/// Aligned multichannel node series. Channel 0 is discharge, the
/// forecast target.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinData {
    pub nodes: Vec<StationId>,
    pub channels: Vec<String>,
    /// One T × N matrix per channel.
    pub values: Vec<DMatrix<f64>>,
    /// N × S static attributes.
    pub statics: Option<DMatrix<f64>>,
    pub timestamps: Vec<DateTime<Utc>>,
}

impl BasinData {
    pub fn new(
        nodes: Vec<StationId>,
        channels: Vec<String>,
        values: Vec<DMatrix<f64>>,
        timestamps: Vec<DateTime<Utc>>,
    ) -> Result<Self, GnnError> {
        if channels.is_empty() || channels.len() != values.len() {
            return Err(GnnError::ShapeMismatch(format!(
                "{} channel names for {} channel matrices",
                channels.len(),
                values.len()
            )));
        }
        let t = timestamps.len();
        for (name, m) in channels.iter().zip(&values) {
            if m.nrows() != t || m.ncols() != nodes.len() {
                return Err(GnnError::ShapeMismatch(format!(
                    "channel `{name}` is {}x{}, expected {t}x{}",
                    m.nrows(),
                    m.ncols(),
                    nodes.len()
                )));
            }
        }
        Ok(Self {
            nodes,
            channels,
            values,
            statics: None,
            timestamps,
        })
    }

    pub fn with_statics(mut self, statics: DMatrix<f64>) -> Result<Self, GnnError> {
        if statics.nrows() != self.nodes.len() {
            return Err(GnnError::ShapeMismatch(
                "static attributes need one row per node".into(),
            ));
        }
        self.statics = Some(statics);
        Ok(self)
    }

    /// Aligns station series on their common timestamps, in the order of
    /// `nodes`. Channels: discharge, then the feature channels by name.
    pub fn from_series(nodes: &[StationId], series: &[GaugeSeries]) -> Result<Self, GnnError> {
        let lookup = |id: StationId| {
            series
                .iter()
                .find(|s| s.station == id)
                .ok_or_else(|| GnnError::InsufficientData(format!("no series for station {id}")))
        };
        let ordered: Vec<&GaugeSeries> = nodes.iter().map(|&id| lookup(id)).collect::<Result<_, _>>()?;
        let first = ordered
            .first()
            .ok_or_else(|| GnnError::InsufficientData("no stations".into()))?;
        let mut common: BTreeSet<DateTime<Utc>> = first.timestamps.iter().copied().collect();
        for s in &ordered[1..] {
            let ts: BTreeSet<_> = s.timestamps.iter().copied().collect();
            common = common.intersection(&ts).copied().collect();
        }
        let timestamps: Vec<DateTime<Utc>> = common.into_iter().collect();
        let mut channels = vec![DISCHARGE.to_string()];
        channels.extend(first.features.keys().cloned());

        let t = timestamps.len();
        let mut values = vec![DMatrix::from_element(t, nodes.len(), f64::NAN); channels.len()];
        for (col, s) in ordered.iter().enumerate() {
            let position: std::collections::HashMap<_, _> =
                s.timestamps.iter().enumerate().map(|(i, ts)| (*ts, i)).collect();
            for (row, ts) in timestamps.iter().enumerate() {
                let k = position[ts];
                values[0][(row, col)] = s.discharge[k];
                for (c, name) in channels.iter().enumerate().skip(1) {
                    let channel = s.features.get(name).ok_or_else(|| {
                        GnnError::InsufficientData(format!("station {} lacks channel `{name}`", s.station))
                    })?;
                    values[c][(row, col)] = channel[k];
                }
            }
        }
        Self::new(nodes.to_vec(), channels, values, timestamps)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn static_dim(&self) -> usize {
        self.statics.as_ref().map_or(0, |s| s.ncols())
    }

    /// Z-scores each channel with statistics pooled over nodes from rows
    /// before `train_end`.
    pub fn normalized(&self, train_end: usize) -> (BasinData, NormStats) {
        let train_end = train_end.min(self.len());
        let features: Vec<FeatureStats> = self
            .channels
            .iter()
            .zip(&self.values)
            .map(|(name, m)| FeatureStats::fit(name, m.rows(0, train_end).iter().copied()))
            .collect();
        let values = self
            .values
            .iter()
            .zip(&features)
            .map(|(m, f)| m.map(|x| f.normalize(x)))
            .collect();
        let statics = self.statics.as_ref().map(|s| {
            let mut s = s.clone();
            for mut col in s.column_iter_mut() {
                let stats = FeatureStats::fit("static", col.iter().copied());
                col.apply(|x| *x = stats.normalize(*x));
            }
            s
        });
        (
            BasinData {
                values,
                statics,
                ..self.clone()
            },
            NormStats { features },
        )
    }

    /// Windows whose forecast origin `t` satisfies `start <= t`,
    /// `t >= alpha` and `t + beta <= end`, every `stride` hours. Windows
    /// with a non-finite input or target are skipped.
    pub fn windows(&self, task: &ForecastTask, start: usize, end: usize, stride: usize) -> Vec<Sample> {
        let (alpha, beta) = (task.alpha_hist, task.beta_horizon);
        let c = self.channels.len();
        let n = self.n_nodes();
        let end = end.min(self.len());
        let first = start.max(alpha);
        let mut out = Vec::new();
        if first + beta > end {
            return out;
        }
        let s_dim = self.static_dim();
        for origin in (first..=end - beta).step_by(stride.max(1)) {
            let mut history = DMatrix::zeros(n, alpha * c + s_dim);
            for node in 0..n {
                for step in 0..alpha {
                    for ch in 0..c {
                        history[(node, step * c + ch)] = self.values[ch][(origin - alpha + step, node)];
                    }
                }
                if let Some(st) = &self.statics {
                    for k in 0..s_dim {
                        history[(node, alpha * c + k)] = st[(node, k)];
                    }
                }
            }
            let target = DMatrix::from_fn(n, beta, |node, h| self.values[0][(origin + h, node)]);
            if history.iter().chain(target.iter()).all(|x| x.is_finite()) {
                out.push(Sample {
                    history,
                    target,
                    origin,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone};

    fn data() -> BasinData {
        let t0 = Utc.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).unwrap();
        let ts: Vec<_> = (0..10).map(|k| t0 + Duration::hours(k)).collect();
        let q = DMatrix::from_fn(10, 2, |t, n| (t * 10 + n) as f64);
        let p = DMatrix::from_fn(10, 2, |t, n| -((t * 10 + n) as f64));
        BasinData::new(vec![5, 9], vec!["discharge".into(), "precip".into()], vec![q, p], ts).unwrap()
    }

    #[test]
    fn window_layout() {
        let d = data();
        let task = ForecastTask {
            alpha_hist: 3,
            beta_horizon: 2,
            feature_dim: 2,
        };
        let w = d.windows(&task, 0, 10, 1);
        // origins 3..=8
        assert_eq!(w.len(), 6);
        let s = &w[0];
        assert_eq!(s.origin, 3);
        // node 1, step 2 (row 2), channel 1 (precip)
        assert_eq!(s.history[(1, 2 * 2 + 1)], -21.0);
        assert_eq!(s.target[(0, 0)], 30.0);
        assert_eq!(s.target[(1, 1)], 41.0);
        // chronological split: test windows never look at targets before it
        let test = d.windows(&task, 6, 10, 1);
        assert!(test.iter().all(|s| s.origin >= 6));
        let train = d.windows(&task, 0, 6, 1);
        assert!(train.iter().all(|s| s.origin + 2 <= 6));
    }

    #[test]
    fn normalization_uses_training_rows() {
        let (norm, stats) = data().normalized(5);
        let q = &stats.features[0];
        // rows 0..5 of both nodes: 0,1,10,11,...,40,41
        assert!((q.mean - 20.5).abs() < 1e-12);
        assert!((norm.values[0][(0, 0)] - (0.0 - 20.5) / q.std).abs() < 1e-12);
    }

    #[test]
    fn from_series_aligns_on_common_hours() {
        let t0 = Utc.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).unwrap();
        let a = GaugeSeries::hourly(2, t0, vec![1.0, 2.0, 3.0]);
        let b = GaugeSeries::hourly(1, t0 + Duration::hours(1), vec![5.0, 6.0, 7.0]);
        let d = BasinData::from_series(&[1, 2], &[a, b]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.values[0][(0, 0)], 5.0);
        assert_eq!(d.values[0][(0, 1)], 2.0);
        assert!(BasinData::from_series(&[3], &[]).is_err());
    }
}
