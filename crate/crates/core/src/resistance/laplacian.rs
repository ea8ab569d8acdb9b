use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use super::ResistanceError;
use crate::graph::AdjacencyMatrix;

/// Eigen/singular values at or below this fraction of the largest one are
/// treated as zero when forming the pseudoinverse.
pub const ZERO_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianMode {
    Symmetric,
    RandomWalk,
}

impl LaplacianMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::RandomWalk => "random-walk",
        }
    }
}

impl std::str::FromStr for LaplacianMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Self::Symmetric),
            "random-walk" => Ok(Self::RandomWalk),
            other => Err(format!("unknown laplacian mode `{other}`")),
        }
    }
}

/// Handling of nodes without outgoing weight in random-walk mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroOutDegree {
    /// Use an out-degree of 1 for such nodes (the river outlet).
    #[default]
    Substitute,
    /// Fail with [`ResistanceError::SingularDegree`].
    Reject,
}

#[derive(Debug, Clone)]
pub struct LaplacianBundle {
    pub mode: LaplacianMode,
    pub laplacian: DMatrix<f64>,
    pub pseudoinverse: DMatrix<f64>,
    /// Connected component of each node in the undirected support.
    pub component_labels: Vec<usize>,
    /// Out-degrees used for indicator scaling (random-walk mode; all ones
    /// in symmetric mode).
    pub scale_degrees: Vec<f64>,
}

impl LaplacianBundle {
    pub fn len(&self) -> usize {
        self.laplacian.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.laplacian.nrows() == 0
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.component_labels[u] == self.component_labels[v]
    }
}

pub fn graph_laplacian(adj: &AdjacencyMatrix, mode: LaplacianMode) -> Result<LaplacianBundle, ResistanceError> {
    graph_laplacian_with(adj, mode, ZeroOutDegree::default())
}

pub fn graph_laplacian_with(
    adj: &AdjacencyMatrix,
    mode: LaplacianMode,
    zero_out: ZeroOutDegree,
) -> Result<LaplacianBundle, ResistanceError> {
    let w = &adj.weights;
    if !w.is_square() {
        return Err(ResistanceError::NotSquare {
            rows: w.nrows(),
            cols: w.ncols(),
        });
    }
    let n = w.nrows();
    for i in 0..n {
        for j in 0..n {
            let x = w[(i, j)];
            if !(x.is_finite() && x >= 0.0) {
                return Err(ResistanceError::InvalidWeight { row: i, col: j });
            }
        }
    }
    let component_labels = support_components(w);

    match mode {
        LaplacianMode::Symmetric => {
            let s = adj.symmetrized();
            let mut lap = -s.clone();
            for i in 0..n {
                lap[(i, i)] = s
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, x)| x)
                    .sum();
            }
            let pseudoinverse = symmetric_pinv(&lap)?;
            Ok(LaplacianBundle {
                mode,
                laplacian: lap,
                pseudoinverse,
                component_labels,
                scale_degrees: vec![1.0; n],
            })
        }
        LaplacianMode::RandomWalk => {
            let mut degrees = Vec::with_capacity(n);
            for i in 0..n {
                let d: f64 = w.row(i).sum();
                if d > 0.0 {
                    degrees.push(d);
                } else if zero_out == ZeroOutDegree::Reject {
                    return Err(ResistanceError::SingularDegree(i));
                } else {
                    degrees.push(1.0);
                }
            }
            let mut lap = DMatrix::identity(n, n);
            for i in 0..n {
                for j in 0..n {
                    lap[(i, j)] -= w[(i, j)] / degrees[i];
                }
            }
            let pseudoinverse = general_pinv(&lap)?;
            Ok(LaplacianBundle {
                mode,
                laplacian: lap,
                pseudoinverse,
                component_labels,
                scale_degrees: degrees,
            })
        }
    }
}

fn symmetric_pinv(lap: &DMatrix<f64>) -> Result<DMatrix<f64>, ResistanceError> {
    let n = lap.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::try_new(lap.clone(), f64::EPSILON, 0).ok_or(ResistanceError::NoConvergence)?;
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut pinv = DMatrix::zeros(n, n);
    if lambda_max == 0.0 {
        return Ok(pinv);
    }
    let tol = ZERO_THRESHOLD * lambda_max;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= tol {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        pinv.ger(1.0 / lambda, &v, &v, 1.0);
    }
    let sym = (&pinv + pinv.transpose()) * 0.5;
    Ok(sym)
}

fn general_pinv(m: &DMatrix<f64>) -> Result<DMatrix<f64>, ResistanceError> {
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0).ok_or(ResistanceError::NoConvergence)?;
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return Ok(DMatrix::zeros(n, n));
    }
    svd.pseudo_inverse(ZERO_THRESHOLD * sigma_max)
        .map_err(|_| ResistanceError::NoConvergence)
}

/// Component labels over the support of `W + Wᵀ`.
fn support_components(w: &DMatrix<f64>) -> Vec<usize> {
    let n = w.nrows();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if label[j] == usize::MAX && (w[(i, j)] > 0.0 || w[(j, i)] > 0.0) {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// Effective resistance between nodes `u` and `v` under the bundle's mode.
///
/// Returns 0 for `u == v`. Pairs in different components are an error, not
/// a large number.
pub fn effective_resistance(bundle: &LaplacianBundle, u: usize, v: usize) -> Result<f64, ResistanceError> {
    let n = bundle.len();
    for index in [u, v] {
        if index >= n {
            return Err(ResistanceError::IndexOutOfRange { index, n });
        }
    }
    if u == v {
        return Ok(0.0);
    }
    if !bundle.same_component(u, v) {
        return Err(ResistanceError::DifferentComponents { u, v });
    }
    let a = 1.0 / bundle.scale_degrees[u].sqrt();
    let b = 1.0 / bundle.scale_degrees[v].sqrt();
    let p = &bundle.pseudoinverse;
    let r = a * a * p[(u, u)] + b * b * p[(v, v)] - a * b * (p[(u, v)] + p[(v, u)]);
    Ok(match bundle.mode {
        // L⁺ is PSD; only roundoff can push this below zero.
        LaplacianMode::Symmetric => r.max(0.0),
        LaplacianMode::RandomWalk => r,
    })
}

/// `(1_u - 1_v)ᵀ M (1_u - 1_v)` written out as a vector product, for tests.
#[cfg(test)]
pub(crate) fn quadratic_form(m: &DMatrix<f64>, u: usize, v: usize, a: f64, b: f64) -> f64 {
    let mut x = nalgebra::DVector::zeros(m.nrows());
    x[u] = a;
    x[v] = -b;
    (x.transpose() * m * &x)[(0, 0)]
}
