use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::GaugeSeries;

/// Channel name used for discharge in [`NormStats`].
pub const DISCHARGE: &str = "discharge";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub name: String,
    pub mean: f64,
    /// Population standard deviation; zero for constant features.
    pub std: f64,
}

impl FeatureStats {
    /// Fits on the finite values of `values`.
    pub fn fit(name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        let (mut n, mut sum, mut sum_sq) = (0usize, 0.0, 0.0);
        let finite: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        for &x in &finite {
            n += 1;
            sum += x;
        }
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        for &x in &finite {
            sum_sq += (x - mean) * (x - mean);
        }
        let std = if n > 0 { (sum_sq / n as f64).sqrt() } else { 0.0 };
        if std == 0.0 {
            log::warn!("feature `{name}` has zero variance; passing it through unscaled");
        }
        Self {
            name: name.to_string(),
            mean,
            std,
        }
    }

    /// Divisor actually applied: the std, or 1 for constant features.
    pub fn scale(&self) -> f64 {
        if self.std > 0.0 {
            self.std
        } else {
            1.0
        }
    }

    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.mean) / self.scale()
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        z * self.scale() + self.mean
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NormStats {
    pub features: Vec<FeatureStats>,
}

impl NormStats {
    pub fn get(&self, name: &str) -> Option<&FeatureStats> {
        self.features.iter().find(|f| f.name == name)
    }
}

/// Z-scores a single column with its own statistics.
pub fn zscore_values(values: &[f64]) -> (Vec<f64>, FeatureStats) {
    let stats = FeatureStats::fit("value", values.iter().copied());
    (values.iter().map(|&x| stats.normalize(x)).collect(), stats)
}

/// Z-scores every channel of every series with statistics pooled across
/// stations. Only samples strictly before `train_end` contribute to the
/// statistics; pass `None` to use everything.
pub fn zscore(series: &[GaugeSeries], train_end: Option<DateTime<Utc>>) -> (Vec<GaugeSeries>, NormStats) {
    let in_train = |t: &DateTime<Utc>| train_end.is_none_or(|end| *t < end);
    let mut names = vec![DISCHARGE.to_string()];
    for s in series {
        for k in s.features.keys() {
            if !names.contains(k) {
                names.push(k.clone());
            }
        }
    }
    let channel = |s: &GaugeSeries, name: &str| -> Option<Vec<f64>> {
        if name == DISCHARGE {
            Some(s.discharge.clone())
        } else {
            s.features.get(name).cloned()
        }
    };
    let features: Vec<FeatureStats> = names
        .iter()
        .map(|name| {
            let pooled = series.iter().flat_map(|s| {
                let values = channel(s, name).unwrap_or_default();
                s.timestamps
                    .iter()
                    .zip(values)
                    .filter(|(t, _)| in_train(t))
                    .map(|(_, x)| x)
                    .collect::<Vec<_>>()
            });
            FeatureStats::fit(name, pooled)
        })
        .collect();
    let stats = NormStats { features };

    let normalized = series
        .iter()
        .map(|s| {
            let mut out = s.clone();
            let d = stats.get(DISCHARGE).expect("discharge stats");
            out.discharge.iter_mut().for_each(|x| *x = d.normalize(*x));
            for (name, values) in out.features.iter_mut() {
                let f = stats.get(name).expect("feature stats");
                values.iter_mut().for_each(|x| *x = f.normalize(*x));
            }
            out
        })
        .collect();
    (normalized, stats)
}
