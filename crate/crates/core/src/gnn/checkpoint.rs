//! JSON weight dump.
//!
//! ```text
//! {
//!   "format": "rivergraph-forecaster", "version": 1,
//!   "kind": "dense", "task": {...}, "config": {...},
//!   "nodes": [...],
//!   "propagation": {"name", "rows", "cols", "data"},
//!   "support": null | {...},
//!   "tensors": [{"name": "w_in", "rows": .., "cols": .., "data": [row-major]}, ...]
//! }
//! ```
//!
//! Readers accept any file with the same format string and major version.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ForecastModel, ForecastTask, GnnError, ModelConfig};
use crate::format::{read_json, write_json, FormatError};
use crate::graph::{AdjacencyKind, AdjacencyMatrix, StationId};

pub const CHECKPOINT_FORMAT: &str = "rivergraph-forecaster";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    fn from_matrix(name: &str, m: &DMatrix<f64>) -> Self {
        Self {
            name: name.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().iter().copied().collect(),
        }
    }

    fn to_matrix(&self) -> Result<DMatrix<f64>, GnnError> {
        if self.data.len() != self.rows * self.cols {
            return Err(GnnError::Checkpoint(format!(
                "tensor `{}` declares {}x{} but holds {} values",
                self.name,
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub kind: AdjacencyKind,
    pub task: ForecastTask,
    pub config: ModelConfig,
    pub nodes: Vec<StationId>,
    pub propagation: Tensor,
    pub support: Option<Tensor>,
    pub tensors: Vec<Tensor>,
}

impl Checkpoint {
    pub fn from_model(model: &ForecastModel, nodes: &[StationId]) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            kind: model.kind,
            task: model.task,
            config: model.config,
            nodes: nodes.to_vec(),
            propagation: Tensor::from_matrix("propagation", &model.propagation),
            support: model.support.as_ref().map(|s| Tensor::from_matrix("support", s)),
            tensors: model
                .weights
                .named()
                .into_iter()
                .map(|(name, m)| Tensor::from_matrix(&name, m))
                .collect(),
        }
    }

    pub fn into_model(self) -> Result<(ForecastModel, Vec<StationId>), GnnError> {
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(GnnError::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            )));
        }
        let n = self.propagation.rows;
        let adjacency = match &self.support {
            Some(s) => AdjacencyMatrix::new(AdjacencyKind::Learned, s.to_matrix()?),
            None => AdjacencyMatrix::new(self.kind, DMatrix::zeros(n, n)),
        };
        let mut model = ForecastModel::zeros(self.task, self.config, &adjacency)?;
        model.kind = self.kind;
        model.propagation = self.propagation.to_matrix()?;
        let expected: Vec<(String, usize, usize)> = model
            .weights
            .named()
            .into_iter()
            .map(|(name, m)| (name, m.nrows(), m.ncols()))
            .collect();
        if expected.len() != self.tensors.len() {
            return Err(GnnError::Checkpoint(format!(
                "expected {} tensors, found {}",
                expected.len(),
                self.tensors.len()
            )));
        }
        for ((name, rows, cols), t) in expected.iter().zip(&self.tensors) {
            if &t.name != name || t.rows != *rows || t.cols != *cols {
                return Err(GnnError::Checkpoint(format!(
                    "tensor `{}` {}x{} does not match `{name}` {rows}x{cols}",
                    t.name, t.rows, t.cols
                )));
            }
        }
        for (slot, t) in model.weights.tensors_mut().into_iter().zip(&self.tensors) {
            *slot = t.to_matrix()?;
        }
        Ok((model, self.nodes))
    }
}

pub fn save_checkpoint(path: &Path, model: &ForecastModel, nodes: &[StationId]) -> Result<(), FormatError> {
    write_json(path, &Checkpoint::from_model(model, nodes))
}

pub fn load_checkpoint(path: &Path) -> Result<(ForecastModel, Vec<StationId>), FormatError> {
    let ckpt: Checkpoint = read_json(path)?;
    ckpt.into_model().map_err(|e| FormatError::invalid(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let task = ForecastTask {
            alpha_hist: 3,
            beta_horizon: 2,
            feature_dim: 2,
        };
        let cfg = ModelConfig {
            layers: 2,
            latent: 3,
            static_dim: 1,
        };
        for kind in AdjacencyKind::ALL {
            let w = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 0.5 });
            let model = ForecastModel::new(task, cfg, &AdjacencyMatrix::new(kind, w), &mut rng).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("model.json");
            save_checkpoint(&path, &model, &[4, 5, 6]).unwrap();
            let (back, nodes) = load_checkpoint(&path).unwrap();
            assert_eq!(nodes, vec![4, 5, 6]);
            assert_eq!(back, model);
        }
    }

    #[test]
    fn rejects_shape_tampering() {
        let model = ForecastModel::zeros(
            ForecastTask::default(),
            ModelConfig::default(),
            &AdjacencyMatrix::isolated(2),
        )
        .unwrap();
        let mut ckpt = Checkpoint::from_model(&model, &[1, 2]);
        ckpt.tensors[0].rows += 1;
        assert!(ckpt.clone().into_model().is_err());
        ckpt.version = 99;
        assert!(ckpt.into_model().is_err());
    }
}
