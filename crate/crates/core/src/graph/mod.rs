//! River networks as weighted directed graphs.
//!
//! A [`RiverNetwork`] stores gauges (stations) and the channel reaches that
//! connect them, oriented from upstream to downstream. Node identifiers are
//! opaque integers; every matrix produced downstream is indexed by the
//! sorted order of those identifiers.

mod adjacency;
mod distance;
pub mod io;
mod network;

pub use adjacency::{AdjacencyKind, AdjacencyMatrix};
pub use distance::{topological_distances, DistanceMatrix};
pub use network::{build_network, Edge, RiverNetwork, StationId};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("cycle detected through station {0}")]
    CycleDetected(StationId),
    #[error("self-loop on station {0}")]
    SelfLoop(StationId),
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: StationId, dst: StationId },
    #[error("duplicate station identifier {0}")]
    DuplicateStation(StationId),
    #[error("edge {src} -> {dst} has non-positive stream length {length}")]
    NonpositiveLength {
        src: StationId,
        dst: StationId,
        length: f64,
    },
    #[error("edge {src} -> {dst} references unknown station {missing}")]
    UnknownEndpoint {
        src: StationId,
        dst: StationId,
        missing: StationId,
    },
    #[error("station {station} has {out_degree} downstream edges; a river tree allows at most one")]
    NotATree { station: StationId, out_degree: usize },
    #[error("unknown station {0}")]
    UnknownStation(StationId),
}
