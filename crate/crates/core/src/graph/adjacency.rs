use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Which construction produced an adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencyKind {
    /// No edges at all.
    Isolated,
    /// Weights only on the river's own directed reaches.
    Topology,
    /// RBF-weighted, row-normalized all-pairs reachability graph.
    Dense,
    /// Dense support with weights trained by the forecaster.
    Learned,
}

impl AdjacencyKind {
    pub const ALL: [AdjacencyKind; 4] = [Self::Isolated, Self::Topology, Self::Dense, Self::Learned];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Isolated => "isolated",
            Self::Topology => "topology",
            Self::Dense => "dense",
            Self::Learned => "learned",
        }
    }
}

impl fmt::Display for AdjacencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdjacencyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "isolated" => Ok(Self::Isolated),
            "topology" => Ok(Self::Topology),
            "dense" => Ok(Self::Dense),
            "learned" => Ok(Self::Learned),
            other => Err(format!("unknown adjacency kind `{other}`")),
        }
    }
}

/// N×N nonnegative weight matrix tagged with its kind.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    pub kind: AdjacencyKind,
    pub weights: DMatrix<f64>,
    /// Set for [`AdjacencyKind::Learned`]; the forecaster updates the
    /// weights on the nonzero support.
    pub trainable: bool,
}

impl AdjacencyMatrix {
    pub fn new(kind: AdjacencyKind, weights: DMatrix<f64>) -> Self {
        Self {
            kind,
            weights,
            trainable: kind == AdjacencyKind::Learned,
        }
    }

    pub fn isolated(n: usize) -> Self {
        Self::new(AdjacencyKind::Isolated, DMatrix::zeros(n, n))
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.nrows() == 0
    }

    pub fn nnz(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    /// `(W + Wᵀ) / 2`.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        (&self.weights + self.weights.transpose()) * 0.5
    }

    /// Nonzero entries in row-major order.
    pub fn coordinates(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = self.weights[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }
}
