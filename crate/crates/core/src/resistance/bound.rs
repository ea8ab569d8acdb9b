use serde::{Deserialize, Serialize};

use super::ResistanceError;

/// Parameters of the layer-wise Jacobian sensitivity bound.
///
/// `alpha_model` and `beta_model` are Lipschitz-type constants of the
/// message-passing layers, unrelated to the forecast window lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Number of message-passing layers.
    pub layers: u32,
    pub alpha_model: f64,
    pub beta_model: f64,
    pub d_max: u32,
    pub d_min: u32,
    /// Spectral quantity of the normalized adjacency, in `[0, 1)`.
    pub mu: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), ResistanceError> {
        if !(0.0..1.0).contains(&self.mu) {
            return Err(ResistanceError::MuOutOfRange(self.mu));
        }
        if self.layers == 0 {
            return Err(ResistanceError::InvalidParams("layer count must be at least 1".into()));
        }
        if !(self.alpha_model > 0.0 && self.beta_model > 0.0) || !(self.alpha_model * self.beta_model).is_finite() {
            return Err(ResistanceError::InvalidParams("alpha and beta must be positive".into()));
        }
        if self.d_min == 0 || self.d_min > self.d_max {
            return Err(ResistanceError::InvalidParams(format!(
                "need 0 < d_min <= d_max, got d_min={} d_max={}",
                self.d_min, self.d_max
            )));
        }
        Ok(())
    }
}

/// Upper bound on `‖∂h_u^(r) / ∂x_v‖` given the effective resistance
/// between `u` and `v`:
///
/// `(2αβ)^r · (d_max/2) · (2/d_min) · ((r + 1 + μ^(r+1)) / (1 − μ) − R)`
///
/// The value is returned as-is; a negative bound means the sensitivity is
/// certified to vanish.
pub fn jacobian_bound(params: &BoundParams, resistance: f64) -> Result<f64, ResistanceError> {
    params.validate()?;
    if !(resistance.is_finite() && resistance >= 0.0) {
        return Err(ResistanceError::InvalidResistance(resistance));
    }
    let r = params.layers as f64;
    let gain = (2.0 * params.alpha_model * params.beta_model).powi(params.layers as i32);
    let degree = (params.d_max as f64 / 2.0) * (2.0 / params.d_min as f64);
    let walk = (r + 1.0 + params.mu.powi(params.layers as i32 + 1)) / (1.0 - params.mu);
    Ok(gain * degree * (walk - resistance))
}
