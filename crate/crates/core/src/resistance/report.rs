use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{effective_resistance, graph_laplacian, LaplacianMode, ResistanceError};
use crate::format::{csv_writer, write_json, FormatError};
use crate::graph::AdjacencyMatrix;

pub const HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges spanning `[0, max]`.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    fn build(values: &[f64], bins: usize) -> Self {
        let max = values.iter().copied().fold(0.0f64, f64::max);
        let width = max / bins as f64;
        let edges = (0..=bins)
            .map(|k| if k == bins { max } else { width * k as f64 })
            .collect();
        let mut counts = vec![0; bins];
        for &x in values {
            let k = if width > 0.0 {
                ((x / width) as usize).min(bins - 1)
            } else {
                0
            };
            counts[k] += 1;
        }
        Self { edges, counts }
    }
}

/// Distribution of pairwise effective resistances for one adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceReport {
    pub n: usize,
    pub mode: LaplacianMode,
    /// Full matrix; pairs outside the analysed component are `+inf`.
    pub pairwise: DMatrix<f64>,
    /// Node count of the largest component, which the statistics cover.
    pub component_size: usize,
    pub pairs: usize,
    pub excluded_pairs: usize,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub histogram: Histogram,
}

#[derive(Serialize, Deserialize)]
pub struct ReportJson {
    pub n: usize,
    pub mode: LaplacianMode,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub histogram: Histogram,
    pub component_size: usize,
    pub pairs: usize,
    pub excluded_pairs: usize,
}

/// Evaluates every unordered pair inside the largest connected component.
///
/// Pairs involving other components are counted in `excluded_pairs` and
/// logged as a warning.
pub fn resistance_report(adj: &AdjacencyMatrix, mode: LaplacianMode) -> Result<ResistanceReport, ResistanceError> {
    let bundle = graph_laplacian(adj, mode)?;
    let n = bundle.len();

    let mut sizes = std::collections::BTreeMap::new();
    for &c in &bundle.component_labels {
        *sizes.entry(c).or_insert(0usize) += 1;
    }
    // largest component; ties go to the lowest label
    let (main, component_size) = sizes.iter().fold(
        (0usize, 0usize),
        |best, (&c, &s)| if s > best.1 { (c, s) } else { best },
    );
    let members: Vec<usize> = (0..n).filter(|&i| bundle.component_labels[i] == main).collect();

    let rows: Vec<Vec<(usize, f64)>> = members
        .par_iter()
        .enumerate()
        .map(|(a, &u)| {
            members[a + 1..]
                .iter()
                .map(|&v| effective_resistance(&bundle, u, v).map(|r| (v, r)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut pairwise = DMatrix::from_element(n, n, f64::INFINITY);
    for i in 0..n {
        pairwise[(i, i)] = 0.0;
    }
    let mut values = Vec::new();
    for (&u, row) in members.iter().zip(&rows) {
        for &(v, r) in row {
            pairwise[(u, v)] = r;
            pairwise[(v, u)] = r;
            values.push(r);
        }
    }
    let total_pairs = n * n.saturating_sub(1) / 2;
    let excluded_pairs = total_pairs - values.len();
    if excluded_pairs > 0 {
        log::warn!(
            "resistance report restricted to largest component ({component_size} of {n} nodes); {excluded_pairs} pairs excluded"
        );
    }

    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    Ok(ResistanceReport {
        n,
        mode,
        pairwise,
        component_size,
        pairs: values.len(),
        excluded_pairs,
        mean,
        median: percentile(&sorted, 0.5),
        p95: percentile(&sorted, 0.95),
        histogram: Histogram::build(&values, HISTOGRAM_BINS),
    })
}

/// Linear interpolation between closest ranks on sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => 0.0,
        1 => sorted[0],
        len => {
            let pos = q * (len - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

impl ResistanceReport {
    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            n: self.n,
            mode: self.mode,
            mean: self.mean,
            median: self.median,
            p95: self.p95,
            histogram: self.histogram.clone(),
            component_size: self.component_size,
            pairs: self.pairs,
            excluded_pairs: self.excluded_pairs,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<(), FormatError> {
        write_json(path, &self.to_json())
    }

    /// `bin_edge,count` rows, one per bin, keyed by the bin's left edge.
    pub fn write_histogram_csv(&self, path: &Path) -> Result<(), FormatError> {
        let mut w = csv_writer(path)?;
        w.write_record(["bin_edge", "count"])
            .map_err(|e| FormatError::csv(path, e))?;
        for (edge, count) in self.histogram.edges.iter().zip(&self.histogram.counts) {
            w.write_record([edge.to_string(), count.to_string()])
                .map_err(|e| FormatError::csv(path, e))?;
        }
        w.flush().map_err(|e| FormatError::io(path, e))
    }
}
