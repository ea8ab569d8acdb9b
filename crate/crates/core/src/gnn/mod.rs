//! Desk-scale message-passing forecaster.
//!
//! A GCN-style network maps an `alpha_hist`-hour window of node features to
//! a `beta_horizon`-hour discharge forecast per node. Gradients are exact
//! (hand-written backpropagation), which also gives the input sensitivity
//! `‖∂y_u / ∂x_v‖` used to observe over-squashing directly.

mod checkpoint;
mod data;
mod experiment;
mod metrics;
mod model;
mod synthetic;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use data::{BasinData, Sample};
pub use experiment::{evaluate_nse, run_experiment, write_metrics_csv, ExperimentConfig, ExperimentResult, MetricRow};
pub use metrics::{mean_absolute_error, nse, nse_weighted};
pub use model::{propagation_matrix, ForecastModel, ForecastTask, LayerWeights, ModelConfig, Weights};
pub use synthetic::{generate_basin, generate_basin_with, random_river_tree, SyntheticBasin, SyntheticConfig};
pub use train::{dataset_loss, loss_and_gradient, train, Optimizer, TrainConfig, TrainReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GnnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonfiniteLoss { epoch: usize, batch: usize, loss: f64 },
    #[error("observed series is constant; NSE is undefined")]
    ConstantObserved,
    #[error("series lengths differ or are shorter than 2 ({predicted} predicted, {observed} observed)")]
    LengthMismatch { predicted: usize, observed: usize },
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
