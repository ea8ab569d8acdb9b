use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Gauge identifier as it appears in the input files.
pub type StationId = u64;

/// A channel reach from `src` (upstream) to `dst` (downstream).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: StationId,
    pub dst: StationId,
    /// Channel distance in kilometers.
    pub stream_length_km: f64,
    /// Elevation difference in meters.
    pub elevation_diff_m: f64,
}

impl Edge {
    pub fn new(src: StationId, dst: StationId, stream_length_km: f64, elevation_diff_m: f64) -> Self {
        Self {
            src,
            dst,
            stream_length_km,
            elevation_diff_m,
        }
    }
}

/// Validated acyclic river graph.
///
/// Nodes are kept sorted by identifier and edges sorted by `(src, dst)`
/// index, so two networks built from the same sets compare equal regardless
/// of input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RiverNetwork {
    nodes: Vec<StationId>,
    index: HashMap<StationId, usize>,
    edges: Vec<Edge>,
}

/// Builds and validates a network.
///
/// Stations referenced only by edges are not added implicitly; pass them in
/// `nodes` (see [`RiverNetwork::from_edges`] for the edge-only case).
pub fn build_network(
    nodes: impl IntoIterator<Item = StationId>,
    edges: impl IntoIterator<Item = Edge>,
) -> Result<RiverNetwork, GraphError> {
    let mut sorted: Vec<StationId> = nodes.into_iter().collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(GraphError::DuplicateStation(w[0]));
    }
    let index: HashMap<StationId, usize> = sorted.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let mut edges: Vec<Edge> = edges.into_iter().collect();
    for e in &edges {
        for endpoint in [e.src, e.dst] {
            if !index.contains_key(&endpoint) {
                return Err(GraphError::UnknownEndpoint {
                    src: e.src,
                    dst: e.dst,
                    missing: endpoint,
                });
            }
        }
        if e.src == e.dst {
            return Err(GraphError::SelfLoop(e.src));
        }
        if !(e.stream_length_km.is_finite() && e.stream_length_km > 0.0) {
            return Err(GraphError::NonpositiveLength {
                src: e.src,
                dst: e.dst,
                length: e.stream_length_km,
            });
        }
    }
    edges.sort_by_key(|e| (index[&e.src], index[&e.dst]));
    if let Some(w) = edges.windows(2).find(|w| w[0].src == w[1].src && w[0].dst == w[1].dst) {
        return Err(GraphError::DuplicateEdge {
            src: w[0].src,
            dst: w[0].dst,
        });
    }

    let net = RiverNetwork {
        nodes: sorted,
        index,
        edges,
    };
    net.topological_order()?;
    Ok(net)
}

impl RiverNetwork {
    /// Builds a network whose node set is exactly the edge endpoints.
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = edges.into_iter().collect();
        let nodes: BTreeSet<StationId> = edges.iter().flat_map(|e| [e.src, e.dst]).collect();
        build_network(nodes, edges)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Station identifiers in matrix order.
    pub fn nodes(&self) -> &[StationId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn index_of(&self, station: StationId) -> Option<usize> {
        self.index.get(&station).copied()
    }

    pub fn contains(&self, station: StationId) -> bool {
        self.index.contains_key(&station)
    }

    pub fn edge(&self, src: StationId, dst: StationId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.src == src && e.dst == dst)
    }

    /// Edges as `(src_index, dst_index, edge)`.
    pub fn indexed_edges(&self) -> impl Iterator<Item = (usize, usize, &Edge)> + '_ {
        self.edges.iter().map(|e| (self.index[&e.src], self.index[&e.dst], e))
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (s, _, _) in self.indexed_edges() {
            out[s] += 1;
        }
        out
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for (_, d, _) in self.indexed_edges() {
            deg[d] += 1;
        }
        deg
    }

    /// Stations without a downstream edge.
    pub fn outlets(&self) -> Vec<StationId> {
        self.out_degrees()
            .iter()
            .zip(&self.nodes)
            .filter(|(&d, _)| d == 0)
            .map(|(_, &s)| s)
            .collect()
    }

    pub fn upstream_of(&self, station: StationId) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.dst == station).collect()
    }

    pub fn downstream_of(&self, station: StationId) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.src == station).collect()
    }

    /// Checks that every station drains into at most one downstream station.
    pub fn validate_tree(&self) -> Result<(), GraphError> {
        match self.out_degrees().iter().enumerate().find(|(_, &d)| d > 1) {
            Some((i, &d)) => Err(GraphError::NotATree {
                station: self.nodes[i],
                out_degree: d,
            }),
            None => Ok(()),
        }
    }

    /// Node indices ordered upstream first (Kahn's algorithm, smallest index
    /// first among ready nodes).
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.len();
        let mut indeg = self.in_degrees();
        let mut children = vec![Vec::new(); n];
        for (s, d, _) in self.indexed_edges() {
            children[s].push(d);
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for &c in &children[i] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push_back(c);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).expect("unvisited node");
            return Err(GraphError::CycleDetected(self.nodes[stuck]));
        }
        Ok(order)
    }

    /// Undirected neighbor lists `(neighbor, stream_length)` per node index.
    pub(crate) fn undirected_neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut nbrs = vec![Vec::new(); self.len()];
        for (s, d, e) in self.indexed_edges() {
            nbrs[s].push((d, e.stream_length_km));
            nbrs[d].push((s, e.stream_length_km));
        }
        nbrs
    }

    /// Connected components of the undirected view, labelled in order of
    /// their smallest node index.
    pub fn components(&self) -> Vec<usize> {
        let nbrs = self.undirected_neighbors();
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(i) = stack.pop() {
                for &(j, _) in &nbrs[i] {
                    if label[j] == usize::MAX {
                        label[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        label
    }
}
