//! Edge and node CSV files.
//!
//! Edges: `src,dst,stream_length_km,elevation_diff_m`.
//! Nodes: `gauge_id` followed by any attribute columns, which are carried
//! through unchanged.

use std::collections::BTreeMap;
use std::path::Path;

use super::{build_network, Edge, RiverNetwork, StationId};
use crate::format::{csv_reader, csv_writer, header_index, parse_field, FormatError};

pub const EDGE_HEADER: [&str; 4] = ["src", "dst", "stream_length_km", "elevation_diff_m"];

pub fn read_edges(path: &Path) -> Result<Vec<Edge>, FormatError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| FormatError::csv(path, e))?.clone();
    let idx: Vec<usize> = EDGE_HEADER
        .iter()
        .map(|c| header_index(path, &headers, c))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| FormatError::csv(path, e))?;
        edges.push(Edge {
            src: parse_field(path, &rec, idx[0], EDGE_HEADER[0])?,
            dst: parse_field(path, &rec, idx[1], EDGE_HEADER[1])?,
            stream_length_km: parse_field(path, &rec, idx[2], EDGE_HEADER[2])?,
            elevation_diff_m: parse_field(path, &rec, idx[3], EDGE_HEADER[3])?,
        });
    }
    Ok(edges)
}

pub fn write_edges(path: &Path, net: &RiverNetwork) -> Result<(), FormatError> {
    let mut w = csv_writer(path)?;
    w.write_record(EDGE_HEADER).map_err(|e| FormatError::csv(path, e))?;
    for e in net.edges() {
        w.write_record([
            e.src.to_string(),
            e.dst.to_string(),
            e.stream_length_km.to_string(),
            e.elevation_diff_m.to_string(),
        ])
        .map_err(|e| FormatError::csv(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}

/// Node table with pass-through attribute columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeTable {
    pub attribute_columns: Vec<String>,
    pub rows: BTreeMap<StationId, Vec<String>>,
}

impl NodeTable {
    pub fn ids(&self) -> impl Iterator<Item = StationId> + '_ {
        self.rows.keys().copied()
    }

    /// Keeps only the listed stations.
    pub fn retain(&mut self, keep: impl Fn(StationId) -> bool) {
        self.rows.retain(|&id, _| keep(id));
    }
}

pub fn read_nodes(path: &Path) -> Result<NodeTable, FormatError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| FormatError::csv(path, e))?.clone();
    let id_col = header_index(path, &headers, "gauge_id")?;
    let attribute_columns = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != id_col)
        .map(|(_, h)| h.to_string())
        .collect();
    let mut rows = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| FormatError::csv(path, e))?;
        let id: StationId = parse_field(path, &rec, id_col, "gauge_id")?;
        let attrs = rec
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id_col)
            .map(|(_, v)| v.to_string())
            .collect();
        if rows.insert(id, attrs).is_some() {
            return Err(FormatError::Malformed {
                path: path.to_path_buf(),
                line: rec.position().map(|p| p.line()).unwrap_or(0),
                message: format!("duplicate gauge_id {id}"),
            });
        }
    }
    Ok(NodeTable {
        attribute_columns,
        rows,
    })
}

pub fn write_nodes(path: &Path, table: &NodeTable) -> Result<(), FormatError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["gauge_id".to_string()];
    header.extend(table.attribute_columns.iter().cloned());
    w.write_record(&header).map_err(|e| FormatError::csv(path, e))?;
    for (id, attrs) in &table.rows {
        let mut row = vec![id.to_string()];
        row.extend(attrs.iter().cloned());
        w.write_record(&row).map_err(|e| FormatError::csv(path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}

/// Reads an edge file and optional node file into a validated network.
/// Stations listed only in the node file become isolated nodes.
pub fn read_network(edges: &Path, nodes: Option<&Path>) -> Result<(RiverNetwork, Option<NodeTable>), FormatError> {
    let edge_list = read_edges(edges)?;
    let table = nodes.map(read_nodes).transpose()?;
    let mut ids: std::collections::BTreeSet<StationId> = edge_list.iter().flat_map(|e| [e.src, e.dst]).collect();
    if let Some(t) = &table {
        ids.extend(t.ids());
    }
    let net = build_network(ids, edge_list).map_err(|e| FormatError::invalid(edges, e.to_string()))?;
    Ok((net, table))
}
