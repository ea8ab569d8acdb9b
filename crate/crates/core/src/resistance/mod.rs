//! Effective resistance on adjacency matrices.
//!
//! Two formulations are supported:
//!
//! * [`LaplacianMode::Symmetric`]: the combinatorial Laplacian of the
//!   symmetrized weights, `L = D - (W + Wᵀ)/2`, with
//!   `R(u,v) = (1_u - 1_v)ᵀ L⁺ (1_u - 1_v)`.
//! * [`LaplacianMode::RandomWalk`]: `L_rw = I - D_out⁻¹ W` on the directed
//!   weights, with indicators scaled by `1/√d_out` and the Moore-Penrose
//!   pseudoinverse taken by SVD.
//!
//! A [`LaplacianBundle`] is immutable once built and can be shared across
//! threads for pairwise evaluation.

mod bound;
mod laplacian;
mod report;

pub use bound::{jacobian_bound, BoundParams};
pub use laplacian::{
    effective_resistance, graph_laplacian, graph_laplacian_with, LaplacianBundle, LaplacianMode, ZeroOutDegree,
};
pub use report::{resistance_report, Histogram, ResistanceReport, HISTOGRAM_BINS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ResistanceError {
    #[error("adjacency must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("adjacency has a negative or non-finite weight at ({row}, {col})")]
    InvalidWeight { row: usize, col: usize },
    #[error("node {0} has zero out-degree; the random-walk Laplacian is undefined there")]
    SingularDegree(usize),
    #[error("nodes {u} and {v} lie in different components; resistance is infinite")]
    DifferentComponents { u: usize, v: usize },
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("decomposition did not converge")]
    NoConvergence,
    #[error("mu must lie in [0, 1), got {0}")]
    MuOutOfRange(f64),
    #[error("invalid bound parameters: {0}")]
    InvalidParams(String),
    #[error("resistance must be finite and nonnegative, got {0}")]
    InvalidResistance(f64),
}
