use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ForecastModel, GnnError, Sample, Weights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Adam with L2 weight decay added to the gradient.
    Adam,
    /// Plain gradient descent with decoupled weight decay.
    GradientDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    /// Epochs at whose start the learning rate is halved.
    pub lr_halving_epochs: Vec<usize>,
    /// Maximum global gradient norm.
    pub clip_norm: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 2e-3,
            weight_decay: 1e-4,
            lr_halving_epochs: vec![1, 50, 80],
            clip_norm: 5.0,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            optimizer: Optimizer::Adam,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        let positive = self.lr > 0.0 && self.clip_norm > 0.0 && self.weight_decay >= 0.0;
        if !positive || self.epochs == 0 || self.batch_size == 0 {
            return Err(GnnError::InvalidConfig(format!(
                "lr and clip norm must be positive, weight decay nonnegative, epochs and batch size at least 1: {self:?}"
            )));
        }
        Ok(())
    }

    /// Learning rate used during `epoch` (0-based).
    pub fn lr_at(&self, epoch: usize) -> f64 {
        let halvings = self.lr_halving_epochs.iter().filter(|&&m| m <= epoch).count();
        self.lr * 0.5f64.powi(halvings as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean absolute error over the training set before training (entry 0)
    /// and after each epoch.
    pub loss_curve: Vec<f64>,
    pub learning_rates: Vec<f64>,
}

/// Mean absolute error over finite targets and its gradient.
pub fn loss_and_gradient(model: &ForecastModel, batch: &[Sample]) -> (f64, Weights) {
    let prop = model.operator();
    let count: usize = batch
        .iter()
        .map(|s| s.target.iter().filter(|x| x.is_finite()).count())
        .sum();
    let count = count.max(1) as f64;
    // fixed chunking keeps the reduction order, and the result, deterministic
    let partials: Vec<(f64, Weights, DMatrix<f64>)> = batch
        .par_chunks(8)
        .map(|chunk| {
            let mut loss = 0.0;
            let mut grads = model.weights.zeros_like();
            let n = prop.nrows();
            let mut d_prop = DMatrix::zeros(n, n);
            for s in chunk {
                let trace = model.trace(&prop, &s.history);
                let dy = trace.y.zip_map(&s.target, |y, t| {
                    if t.is_finite() {
                        let r = y - t;
                        loss += r.abs();
                        if r > 0.0 {
                            1.0 / count
                        } else if r < 0.0 {
                            -1.0 / count
                        } else {
                            0.0
                        }
                    } else {
                        0.0
                    }
                });
                let back = model.backward(&prop, &trace, &dy);
                grads.add_scaled(&back.grads, 1.0);
                d_prop += back.d_propagation;
            }
            (loss, grads, d_prop)
        })
        .collect();

    let mut loss = 0.0;
    let mut grads = model.weights.zeros_like();
    let n = prop.nrows();
    let mut d_prop = DMatrix::zeros(n, n);
    for (l, g, d) in partials {
        loss += l;
        grads.add_scaled(&g, 1.0);
        d_prop += d;
    }
    if let Some(dl) = model.logit_gradient(&prop, &d_prop) {
        grads.logits = Some(dl);
    }
    (loss / count, grads)
}

/// Mean absolute error over every finite target in `data`.
pub fn dataset_loss(model: &ForecastModel, data: &[Sample]) -> f64 {
    let prop = model.operator();
    let (sum, count) = data
        .par_chunks(16)
        .map(|chunk| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for s in chunk {
                let y = model.trace(&prop, &s.history).y;
                for (p, t) in y.iter().zip(s.target.iter()) {
                    if t.is_finite() {
                        sum += (p - t).abs();
                        count += 1;
                    }
                }
            }
            (sum, count)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0usize), |(a, b), (c, d)| (a + c, b + d));
    sum / count.max(1) as f64
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

/// Trains `model` in place on `data` with mini-batch updates, global-norm
/// clipping and the step learning-rate schedule. Deterministic for a fixed
/// seed.
pub fn train(model: &mut ForecastModel, data: &[Sample], config: &TrainConfig) -> Result<TrainReport, GnnError> {
    config.validate()?;
    if data.is_empty() {
        return Err(GnnError::InsufficientData("no training windows".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let n_params = model.weights.len();
    let mut adam = Adam {
        m: vec![0.0; n_params],
        v: vec![0.0; n_params],
        step: 0,
    };
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);

    let mut loss_curve = vec![dataset_loss(model, data)];
    let mut learning_rates = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let lr = config.lr_at(epoch);
        learning_rates.push(lr);
        order.shuffle(&mut rng);
        for (batch_idx, idx) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<Sample> = idx.iter().map(|&i| data[i].clone()).collect();
            let (loss, mut grads) = loss_and_gradient(model, &batch);
            if !loss.is_finite() || !grads.all_finite() {
                return Err(GnnError::NonfiniteLoss {
                    epoch,
                    batch: batch_idx,
                    loss,
                });
            }
            let norm = grads.norm();
            if norm > config.clip_norm {
                let scale = config.clip_norm / (norm + 1e-6);
                for g in grads.tensors_mut() {
                    *g *= scale;
                }
            }
            let mut theta = model.weights.flatten();
            let g = grads.flatten();
            match config.optimizer {
                Optimizer::Adam => {
                    adam.step += 1;
                    let bc1 = 1.0 - beta1.powi(adam.step);
                    let bc2 = 1.0 - beta2.powi(adam.step);
                    for k in 0..n_params {
                        let gk = g[k] + config.weight_decay * theta[k];
                        adam.m[k] = beta1 * adam.m[k] + (1.0 - beta1) * gk;
                        adam.v[k] = beta2 * adam.v[k] + (1.0 - beta2) * gk * gk;
                        let m_hat = adam.m[k] / bc1;
                        let v_hat = adam.v[k] / bc2;
                        theta[k] -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
                Optimizer::GradientDescent => {
                    for k in 0..n_params {
                        theta[k] -= lr * (g[k] + config.weight_decay * theta[k]);
                    }
                }
            }
            model.weights.assign(&theta);
        }
        let loss = dataset_loss(model, data);
        if !loss.is_finite() {
            return Err(GnnError::NonfiniteLoss {
                epoch,
                batch: usize::MAX,
                loss,
            });
        }
        loss_curve.push(loss);
        log::debug!("epoch {epoch}: lr {lr:.2e}, train MAE {loss:.5}");
    }
    Ok(TrainReport {
        loss_curve,
        learning_rates,
    })
}
