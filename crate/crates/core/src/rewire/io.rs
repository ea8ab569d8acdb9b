//! Adjacency export: coordinate-list CSV `src,dst,weight` plus a JSON
//! sidecar `{kind, sigma, n, nnz, nodes}`.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::format::{csv_reader, csv_writer, header_index, parse_field, read_json, write_json, FormatError};
use crate::graph::{AdjacencyKind, AdjacencyMatrix, StationId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMetadata {
    pub kind: AdjacencyKind,
    pub sigma: Option<f64>,
    pub n: usize,
    pub nnz: usize,
    /// Station identifiers in matrix order.
    pub nodes: Vec<StationId>,
}

/// Sidecar path for an adjacency CSV: same stem, `.json` extension.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the coordinate list in row-major order, labelled by station id.
pub fn write_adjacency(
    csv_path: &Path,
    adj: &AdjacencyMatrix,
    nodes: &[StationId],
    sigma: Option<f64>,
) -> Result<AdjacencyMetadata, FormatError> {
    if nodes.len() != adj.len() {
        return Err(FormatError::invalid(
            csv_path,
            format!("{} node ids for a {}x{} adjacency", nodes.len(), adj.len(), adj.len()),
        ));
    }
    let mut w = csv_writer(csv_path)?;
    w.write_record(["src", "dst", "weight"])
        .map_err(|e| FormatError::csv(csv_path, e))?;
    for (i, j, x) in adj.coordinates() {
        w.write_record([nodes[i].to_string(), nodes[j].to_string(), x.to_string()])
            .map_err(|e| FormatError::csv(csv_path, e))?;
    }
    w.flush().map_err(|e| FormatError::io(csv_path, e))?;
    let meta = AdjacencyMetadata {
        kind: adj.kind,
        sigma,
        n: adj.len(),
        nnz: adj.nnz(),
        nodes: nodes.to_vec(),
    };
    write_json(&metadata_path(csv_path), &meta)?;
    Ok(meta)
}

/// Reads an adjacency CSV. The node list and kind come from the sidecar
/// when present; otherwise nodes are the sorted identifiers seen in the
/// file and `fallback_kind` is used.
pub fn read_adjacency(
    csv_path: &Path,
    fallback_kind: AdjacencyKind,
) -> Result<(AdjacencyMatrix, AdjacencyMetadata), FormatError> {
    let mut rdr = csv_reader(csv_path)?;
    let headers = rdr.headers().map_err(|e| FormatError::csv(csv_path, e))?.clone();
    let cols: Vec<usize> = ["src", "dst", "weight"]
        .iter()
        .map(|c| header_index(csv_path, &headers, c))
        .collect::<Result<_, _>>()?;
    let mut triples: Vec<(StationId, StationId, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| FormatError::csv(csv_path, e))?;
        let weight: f64 = parse_field(csv_path, &rec, cols[2], "weight")?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(FormatError::Malformed {
                path: csv_path.to_path_buf(),
                line: rec.position().map(|p| p.line()).unwrap_or(0),
                message: format!("weight must be finite and nonnegative, got {weight}"),
            });
        }
        triples.push((
            parse_field(csv_path, &rec, cols[0], "src")?,
            parse_field(csv_path, &rec, cols[1], "dst")?,
            weight,
        ));
    }

    let sidecar = metadata_path(csv_path);
    let (kind, sigma, nodes) = if sidecar.exists() {
        let meta: AdjacencyMetadata = read_json(&sidecar)?;
        (meta.kind, meta.sigma, meta.nodes)
    } else {
        let mut ids: Vec<StationId> = triples.iter().flat_map(|&(s, d, _)| [s, d]).collect();
        ids.sort_unstable();
        ids.dedup();
        (fallback_kind, None, ids)
    };
    let index: std::collections::HashMap<StationId, usize> = nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = nodes.len();
    let mut weights = DMatrix::zeros(n, n);
    for (s, d, x) in triples {
        let (Some(&i), Some(&j)) = (index.get(&s), index.get(&d)) else {
            return Err(FormatError::invalid(
                csv_path,
                format!("edge {s} -> {d} not in node list"),
            ));
        };
        weights[(i, j)] = x;
    }
    let adj = AdjacencyMatrix::new(kind, weights);
    let meta = AdjacencyMetadata {
        kind,
        sigma,
        n,
        nnz: adj.nnz(),
        nodes,
    };
    Ok((adj, meta))
}
