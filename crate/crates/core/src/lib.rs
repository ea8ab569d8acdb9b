//! River-network graph rewiring and over-squashing diagnostics.
//!
//! * [`graph`]: validated river networks and channel-distance matrices.
//! * [`resistance`]: Laplacian pseudoinverses, effective resistance and the
//!   Jacobian sensitivity bound.
//! * [`rewire`]: the four adjacency constructions, including the RBF dense
//!   reachability graph.
//! * [`preprocess`]: gauge quality control, bypass of failed stations and
//!   Z-score normalization.
//! * [`gnn`]: a small message-passing forecaster with exact gradients,
//!   NSE evaluation and a synthetic basin generator.

pub mod format;
pub mod gnn;
pub mod graph;
pub mod preprocess;
pub mod resistance;
pub mod rewire;

pub use format::FormatError;
pub use graph::{
    build_network, topological_distances, AdjacencyKind, AdjacencyMatrix, DistanceMatrix, Edge, RiverNetwork, StationId,
};
pub use resistance::{
    effective_resistance, graph_laplacian, jacobian_bound, resistance_report, BoundParams, LaplacianBundle,
    LaplacianMode, ResistanceReport,
};
pub use rewire::{build_adjacency, dense_transform, RewireConfig, Sigma};
