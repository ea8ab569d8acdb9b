//! Adjacency constructions for river networks.
//!
//! The dense transform replaces the sparse river tree by an all-pairs
//! graph whose weights come from a Gaussian RBF kernel on channel distance,
//! `exp(-d² / (2σ²))`, with self-loops removed and every row normalized to
//! sum to one.

pub mod io;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::{AdjacencyKind, AdjacencyMatrix, DistanceMatrix, RiverNetwork};

#[derive(Debug, Error, PartialEq)]
pub enum RewireError {
    #[error("invalid rewire configuration: {0}")]
    InvalidConfig(String),
    #[error("row {0} has no positive weight before normalization; the node is unreachable")]
    IsolatedRow(usize),
    #[error("kernel bandwidth is zero: all finite distances are equal")]
    DegenerateSigma,
    #[error("no finite off-diagonal distances to estimate the kernel bandwidth from")]
    NoFiniteDistances,
    #[error("distance matrix has {distances} nodes but the network has {network}")]
    SizeMismatch { distances: usize, network: usize },
}

/// Kernel bandwidth in kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Sigma {
    /// Population standard deviation of the finite off-diagonal distances.
    #[default]
    Auto,
    Km(f64),
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Auto => f.write_str("auto"),
            Sigma::Km(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Sigma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Sigma::Auto);
        }
        s.parse::<f64>()
            .map(Sigma::Km)
            .map_err(|_| format!("sigma must be `auto` or a number of kilometers, got `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewireConfig {
    pub sigma: Sigma,
    pub kind: AdjacencyKind,
    /// Kernel weights below this value are dropped before normalization.
    pub epsilon_prune: f64,
}

impl Default for RewireConfig {
    fn default() -> Self {
        Self {
            sigma: Sigma::Auto,
            kind: AdjacencyKind::Dense,
            epsilon_prune: 0.0,
        }
    }
}

impl RewireConfig {
    pub fn new(kind: AdjacencyKind, sigma: Sigma) -> Self {
        Self {
            sigma,
            kind,
            epsilon_prune: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), RewireError> {
        if let Sigma::Km(s) = self.sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(RewireError::InvalidConfig(format!("sigma must be positive, got {s}")));
            }
        }
        if !(0.0..1.0).contains(&self.epsilon_prune) {
            return Err(RewireError::InvalidConfig(format!(
                "prune threshold must lie in [0, 1), got {}",
                self.epsilon_prune
            )));
        }
        Ok(())
    }
}

/// Resolves the kernel bandwidth against a distance matrix.
pub fn resolve_sigma(distances: &DistanceMatrix, sigma: Sigma) -> Result<f64, RewireError> {
    match sigma {
        Sigma::Km(s) => Ok(s),
        Sigma::Auto => {
            let values: Vec<f64> = distances.finite_pairs().collect();
            if values.is_empty() {
                return Err(RewireError::NoFiniteDistances);
            }
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std > 0.0 {
                Ok(std)
            } else {
                Err(RewireError::DegenerateSigma)
            }
        }
    }
}

fn rbf(d: f64, sigma: f64) -> f64 {
    if d.is_finite() {
        (-(d * d) / (2.0 * sigma * sigma)).exp()
    } else {
        0.0
    }
}

/// RBF reachability graph with zero diagonal and unit row sums.
pub fn dense_transform(distances: &DistanceMatrix, config: &RewireConfig) -> Result<AdjacencyMatrix, RewireError> {
    config.validate()?;
    let sigma = resolve_sigma(distances, config.sigma)?;
    let n = distances.len();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = rbf(distances.get(i, j), sigma);
            if k > 0.0 && k >= config.epsilon_prune {
                w[(i, j)] = k;
                sum += k;
            }
        }
        if sum.is_nan() || sum <= 0.0 {
            return Err(RewireError::IsolatedRow(i));
        }
        for j in 0..n {
            w[(i, j)] /= sum;
        }
    }
    Ok(AdjacencyMatrix::new(AdjacencyKind::Dense, w))
}

/// Builds the adjacency of the configured kind.
///
/// * isolated: zero matrix.
/// * topology: the RBF kernel restricted to the network's directed edges,
///   nonzero rows normalized to one. Only the support differs from dense.
/// * dense: [`dense_transform`].
/// * learned: the dense support with uniform row weights, flagged
///   trainable.
pub fn build_adjacency(
    net: &RiverNetwork,
    distances: &DistanceMatrix,
    config: &RewireConfig,
) -> Result<AdjacencyMatrix, RewireError> {
    config.validate()?;
    if net.len() != distances.len() {
        return Err(RewireError::SizeMismatch {
            distances: distances.len(),
            network: net.len(),
        });
    }
    let n = net.len();
    match config.kind {
        AdjacencyKind::Isolated => Ok(AdjacencyMatrix::isolated(n)),
        AdjacencyKind::Topology => {
            let sigma = resolve_sigma(distances, config.sigma)?;
            let mut w = DMatrix::zeros(n, n);
            for (s, d, _) in net.indexed_edges() {
                w[(s, d)] = rbf(distances.get(s, d), sigma);
            }
            for i in 0..n {
                let sum: f64 = w.row(i).sum();
                if sum > 0.0 {
                    for j in 0..n {
                        w[(i, j)] /= sum;
                    }
                }
            }
            Ok(AdjacencyMatrix::new(AdjacencyKind::Topology, w))
        }
        AdjacencyKind::Dense => dense_transform(distances, config),
        AdjacencyKind::Learned => {
            let dense = dense_transform(distances, config)?;
            let mut w = dense.weights;
            for i in 0..n {
                let support = w.row(i).iter().filter(|&&x| x > 0.0).count();
                for j in 0..n {
                    if w[(i, j)] > 0.0 {
                        w[(i, j)] = 1.0 / support as f64;
                    }
                }
            }
            Ok(AdjacencyMatrix::new(AdjacencyKind::Learned, w))
        }
    }
}
