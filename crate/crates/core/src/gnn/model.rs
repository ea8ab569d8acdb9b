use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GnnError;
use crate::graph::{AdjacencyKind, AdjacencyMatrix};

/// Forecast window: `alpha_hist` hours of `feature_dim` channels in,
/// `beta_horizon` hours of discharge out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastTask {
    pub alpha_hist: usize,
    pub beta_horizon: usize,
    pub feature_dim: usize,
}

impl Default for ForecastTask {
    fn default() -> Self {
        Self {
            alpha_hist: 24,
            beta_horizon: 24,
            feature_dim: 1,
        }
    }
}

impl ForecastTask {
    pub fn validate(&self) -> Result<(), GnnError> {
        if self.alpha_hist == 0 || self.beta_horizon == 0 || self.feature_dim == 0 {
            return Err(GnnError::InvalidConfig(format!(
                "window sizes must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Width of the flattened history per node.
    pub fn history_width(&self) -> usize {
        self.alpha_hist * self.feature_dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers: usize,
    pub latent: usize,
    /// Per-node static attributes appended to the history.
    pub static_dim: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            layers: 3,
            latent: 32,
            static_dim: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    pub w_neighbor: DMatrix<f64>,
    pub w_self: DMatrix<f64>,
    /// 1 × latent
    pub bias: DMatrix<f64>,
}

/// All trainable tensors. Biases are stored as single-row matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub w_in: DMatrix<f64>,
    pub b_in: DMatrix<f64>,
    pub layers: Vec<LayerWeights>,
    pub w_out: DMatrix<f64>,
    pub b_out: DMatrix<f64>,
    /// Edge logits of a learned adjacency (N × N, zero off the support).
    pub logits: Option<DMatrix<f64>>,
}

impl Weights {
    pub fn named(&self) -> Vec<(String, &DMatrix<f64>)> {
        let mut out = vec![("w_in".to_string(), &self.w_in), ("b_in".to_string(), &self.b_in)];
        for (l, layer) in self.layers.iter().enumerate() {
            out.push((format!("layer{l}.w_neighbor"), &layer.w_neighbor));
            out.push((format!("layer{l}.w_self"), &layer.w_self));
            out.push((format!("layer{l}.bias"), &layer.bias));
        }
        out.push(("w_out".to_string(), &self.w_out));
        out.push(("b_out".to_string(), &self.b_out));
        if let Some(logits) = &self.logits {
            out.push(("logits".to_string(), logits));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut DMatrix<f64>> {
        let mut out = vec![&mut self.w_in, &mut self.b_in];
        for layer in &mut self.layers {
            out.push(&mut layer.w_neighbor);
            out.push(&mut layer.w_self);
            out.push(&mut layer.bias);
        }
        out.push(&mut self.w_out);
        out.push(&mut self.b_out);
        if let Some(logits) = &mut self.logits {
            out.push(logits);
        }
        out
    }

    pub fn zeros_like(&self) -> Self {
        let z = |m: &DMatrix<f64>| DMatrix::zeros(m.nrows(), m.ncols());
        Self {
            w_in: z(&self.w_in),
            b_in: z(&self.b_in),
            layers: self
                .layers
                .iter()
                .map(|l| LayerWeights {
                    w_neighbor: z(&l.w_neighbor),
                    w_self: z(&l.w_self),
                    bias: z(&l.bias),
                })
                .collect(),
            w_out: z(&self.w_out),
            b_out: z(&self.b_out),
            logits: self.logits.as_ref().map(z),
        }
    }

    pub fn len(&self) -> usize {
        self.named().iter().map(|(_, m)| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.named().iter().flat_map(|(_, m)| m.iter().copied()).collect()
    }

    /// Overwrites every tensor from a flat vector in [`Weights::flatten`] order.
    pub fn assign(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for m in self.tensors_mut() {
            let len = m.len();
            m.as_mut_slice().copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter vector has the wrong length");
    }

    pub fn norm(&self) -> f64 {
        self.named().iter().map(|(_, m)| m.norm_squared()).sum::<f64>().sqrt()
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &Weights, scale: f64) {
        let others: Vec<&DMatrix<f64>> = other.named().into_iter().map(|(_, m)| m).collect();
        for (m, o) in self.tensors_mut().into_iter().zip(others) {
            m.zip_apply(o, |a, b| *a += scale * b);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.named().iter().all(|(_, m)| m.iter().all(|x| x.is_finite()))
    }
}

/// Propagation operator a layer multiplies node states by.
///
/// * isolated: identity.
/// * topology: `D̃^{-1/2} (A + Aᵀ + I) D̃^{-1/2}` on the undirected support.
/// * dense and learned: the weights as given.
pub fn propagation_matrix(adj: &AdjacencyMatrix) -> DMatrix<f64> {
    let n = adj.len();
    match adj.kind {
        AdjacencyKind::Isolated => DMatrix::identity(n, n),
        AdjacencyKind::Topology => {
            let a = &adj.weights + adj.weights.transpose() + DMatrix::identity(n, n);
            let inv_sqrt: Vec<f64> = (0..n).map(|i| 1.0 / a.row(i).sum().sqrt()).collect();
            DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * a[(i, j)] * inv_sqrt[j])
        }
        AdjacencyKind::Dense | AdjacencyKind::Learned => adj.weights.clone(),
    }
}

/// Row softmax over the support mask; rows without support stay zero.
fn masked_softmax(logits: &DMatrix<f64>, support: &DMatrix<f64>) -> DMatrix<f64> {
    let n = logits.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let max = (0..n)
            .filter(|&j| support[(i, j)] > 0.0)
            .map(|j| logits[(i, j)])
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            continue;
        }
        let mut sum = 0.0;
        for j in 0..n {
            if support[(i, j)] > 0.0 {
                let e = (logits[(i, j)] - max).exp();
                out[(i, j)] = e;
                sum += e;
            }
        }
        for j in 0..n {
            out[(i, j)] /= sum;
        }
    }
    out
}

/// Layered GCN-style forecaster.
///
/// Per sample with node inputs `X` (N × history width):
///
/// ```text
/// H0 = relu(X W_in + b_in)
/// Hl = relu(Â H(l-1) W_neighbor + H(l-1) W_self + b)    l = 1..layers
/// Y  = H_L W_out + b_out                                 (N × beta)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    pub task: ForecastTask,
    pub config: ModelConfig,
    pub kind: AdjacencyKind,
    /// Fixed operator for non-learned kinds.
    pub propagation: DMatrix<f64>,
    /// 0/1 support of a learned adjacency.
    pub support: Option<DMatrix<f64>>,
    pub weights: Weights,
}

pub(crate) struct Trace {
    x: DMatrix<f64>,
    z0: DMatrix<f64>,
    h: Vec<DMatrix<f64>>,
    m: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
    pub(crate) y: DMatrix<f64>,
}

pub(crate) struct Backward {
    pub grads: Weights,
    pub d_input: DMatrix<f64>,
    pub d_propagation: DMatrix<f64>,
}

fn glorot(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..bound))
}

fn add_bias(m: &mut DMatrix<f64>, bias: &DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        row += bias.row(0);
    }
}

fn column_sums(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(1, m.ncols(), |_, j| m.column(j).sum())
}

fn relu(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|x| if x > 0.0 { x } else { 0.0 })
}

impl ForecastModel {
    /// Glorot-uniform weights, zero biases.
    pub fn new(
        task: ForecastTask,
        config: ModelConfig,
        adjacency: &AdjacencyMatrix,
        rng: &mut impl Rng,
    ) -> Result<Self, GnnError> {
        let mut model = Self::zeros(task, config, adjacency)?;
        let in_dim = model.input_width();
        let latent = config.latent;
        model.weights.w_in = glorot(rng, in_dim, latent);
        for layer in &mut model.weights.layers {
            layer.w_neighbor = glorot(rng, latent, latent);
            layer.w_self = glorot(rng, latent, latent);
        }
        model.weights.w_out = glorot(rng, latent, task.beta_horizon);
        Ok(model)
    }

    /// All weights zero; learned adjacencies start from the given weights.
    pub fn zeros(task: ForecastTask, config: ModelConfig, adjacency: &AdjacencyMatrix) -> Result<Self, GnnError> {
        task.validate()?;
        if config.layers == 0 || config.latent == 0 {
            return Err(GnnError::InvalidConfig(
                "layers and latent width must be positive".into(),
            ));
        }
        if !adjacency.weights.is_square() {
            return Err(GnnError::ShapeMismatch("adjacency must be square".into()));
        }
        let in_dim = task.history_width() + config.static_dim;
        let latent = config.latent;
        let (support, logits) = if adjacency.kind == AdjacencyKind::Learned {
            let support = adjacency.weights.map(|w| if w > 0.0 { 1.0 } else { 0.0 });
            let logits = adjacency.weights.map(|w| if w > 0.0 { w.ln() } else { 0.0 });
            (Some(support), Some(logits))
        } else {
            (None, None)
        };
        let weights = Weights {
            w_in: DMatrix::zeros(in_dim, latent),
            b_in: DMatrix::zeros(1, latent),
            layers: (0..config.layers)
                .map(|_| LayerWeights {
                    w_neighbor: DMatrix::zeros(latent, latent),
                    w_self: DMatrix::zeros(latent, latent),
                    bias: DMatrix::zeros(1, latent),
                })
                .collect(),
            w_out: DMatrix::zeros(latent, task.beta_horizon),
            b_out: DMatrix::zeros(1, task.beta_horizon),
            logits,
        };
        Ok(Self {
            task,
            config,
            kind: adjacency.kind,
            propagation: propagation_matrix(adjacency),
            support,
            weights,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.propagation.nrows()
    }

    pub fn input_width(&self) -> usize {
        self.task.history_width() + self.config.static_dim
    }

    /// Current propagation operator (row softmax of the logits for learned
    /// adjacencies).
    pub fn operator(&self) -> DMatrix<f64> {
        match (&self.weights.logits, &self.support) {
            (Some(logits), Some(support)) => masked_softmax(logits, support),
            _ => self.propagation.clone(),
        }
    }

    fn check_input(&self, x: &DMatrix<f64>) -> Result<(), GnnError> {
        if x.nrows() != self.n_nodes() || x.ncols() != self.input_width() {
            return Err(GnnError::ShapeMismatch(format!(
                "input is {}x{}, model expects {}x{}",
                x.nrows(),
                x.ncols(),
                self.n_nodes(),
                self.input_width()
            )));
        }
        Ok(())
    }

    /// Forecast for one sample: N × beta.
    pub fn forward(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, GnnError> {
        self.check_input(x)?;
        Ok(self.trace(&self.operator(), x).y)
    }

    pub(crate) fn trace(&self, prop: &DMatrix<f64>, x: &DMatrix<f64>) -> Trace {
        let w = &self.weights;
        let mut z0 = x * &w.w_in;
        add_bias(&mut z0, &w.b_in);
        let mut h = vec![relu(&z0)];
        let mut m = Vec::with_capacity(w.layers.len());
        let mut z = Vec::with_capacity(w.layers.len());
        for layer in &w.layers {
            let prev = h.last().expect("h0");
            let msg = prop * prev;
            let mut zl = &msg * &layer.w_neighbor + prev * &layer.w_self;
            add_bias(&mut zl, &layer.bias);
            h.push(relu(&zl));
            m.push(msg);
            z.push(zl);
        }
        let mut y = h.last().expect("hL") * &w.w_out;
        add_bias(&mut y, &w.b_out);
        Trace {
            x: x.clone(),
            z0,
            h,
            m,
            z,
            y,
        }
    }

    /// Backpropagates `dy` (N × beta) through a recorded trace.
    pub(crate) fn backward(&self, prop: &DMatrix<f64>, trace: &Trace, dy: &DMatrix<f64>) -> Backward {
        let w = &self.weights;
        let mut grads = w.zeros_like();
        let n = prop.nrows();
        let mut d_prop = DMatrix::zeros(n, n);
        let layers = w.layers.len();

        grads.w_out = trace.h[layers].transpose() * dy;
        grads.b_out = column_sums(dy);
        let mut dh = dy * w.w_out.transpose();
        for l in (0..layers).rev() {
            let layer = &w.layers[l];
            let dz = dh.zip_map(&trace.z[l], |g, z| if z > 0.0 { g } else { 0.0 });
            let prev = &trace.h[l];
            let g = &mut grads.layers[l];
            g.w_neighbor = trace.m[l].transpose() * &dz;
            g.w_self = prev.transpose() * &dz;
            g.bias = column_sums(&dz);
            let dm = &dz * layer.w_neighbor.transpose();
            if self.support.is_some() {
                d_prop += &dm * prev.transpose();
            }
            dh = prop.transpose() * &dm + &dz * layer.w_self.transpose();
        }
        let dz0 = dh.zip_map(&trace.z0, |g, z| if z > 0.0 { g } else { 0.0 });
        grads.w_in = trace.x.transpose() * &dz0;
        grads.b_in = column_sums(&dz0);
        let d_input = &dz0 * w.w_in.transpose();
        Backward {
            grads,
            d_input,
            d_propagation: d_prop,
        }
    }

    /// Chain rule from `∂L/∂Â` to the learned logits through the row
    /// softmax.
    pub(crate) fn logit_gradient(&self, prop: &DMatrix<f64>, d_prop: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        let support = self.support.as_ref()?;
        let n = prop.nrows();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            let inner: f64 = (0..n).map(|k| prop[(i, k)] * d_prop[(i, k)]).sum();
            for j in 0..n {
                if support[(i, j)] > 0.0 {
                    out[(i, j)] = prop[(i, j)] * (d_prop[(i, j)] - inner);
                }
            }
        }
        Some(out)
    }

    /// Frobenius norm of `∂y_u / ∂x_v`, the Jacobian of node `u`'s forecast
    /// with respect to node `v`'s history window (static attributes
    /// excluded).
    pub fn sensitivity(&self, x: &DMatrix<f64>, u: usize, v: usize) -> Result<f64, GnnError> {
        self.jacobian(x, u, v).map(|j| j.norm())
    }

    /// `beta × history_width` Jacobian block of node `u`'s outputs with
    /// respect to node `v`'s history.
    pub fn jacobian(&self, x: &DMatrix<f64>, u: usize, v: usize) -> Result<DMatrix<f64>, GnnError> {
        self.check_input(x)?;
        let n = self.n_nodes();
        if u >= n || v >= n {
            return Err(GnnError::ShapeMismatch(format!(
                "node index out of range for {n} nodes"
            )));
        }
        let prop = self.operator();
        let trace = self.trace(&prop, x);
        let beta = self.task.beta_horizon;
        let width = self.task.history_width();
        let mut jac = DMatrix::zeros(beta, width);
        for k in 0..beta {
            let mut dy = DMatrix::zeros(n, beta);
            dy[(u, k)] = 1.0;
            let back = self.backward(&prop, &trace, &dy);
            for c in 0..width {
                jac[(k, c)] = back.d_input[(v, c)];
            }
        }
        Ok(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain_topology(n: usize) -> AdjacencyMatrix {
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            w[(i, i + 1)] = 1.0;
        }
        AdjacencyMatrix::new(AdjacencyKind::Topology, w)
    }

    fn task() -> ForecastTask {
        ForecastTask {
            alpha_hist: 3,
            beta_horizon: 2,
            feature_dim: 2,
        }
    }

    fn small() -> ModelConfig {
        ModelConfig {
            layers: 3,
            latent: 5,
            static_dim: 0,
        }
    }

    fn random_input(rng: &mut ChaCha8Rng, n: usize, width: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, width, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn topology_operator_is_symmetric_normalized() {
        let p = propagation_matrix(&chain_topology(3));
        // degrees with self loops: 2, 3, 2
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((p[(0, 1)] - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(p[(0, 2)], 0.0);
        assert_eq!(p, p.transpose());
    }

    #[test]
    fn isolated_passthrough_has_no_cross_talk() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let model = ForecastModel::new(task(), small(), &AdjacencyMatrix::isolated(4), &mut rng).unwrap();
        let x = random_input(&mut rng, 4, 6);
        for u in 0..4 {
            for v in 0..4 {
                let s = model.sensitivity(&x, u, v).unwrap();
                if u != v {
                    assert_eq!(s, 0.0);
                }
            }
        }
        // changing node 2's input leaves node 0's output untouched
        let y = model.forward(&x).unwrap();
        let mut x2 = x.clone();
        x2.row_mut(2).fill(3.0);
        let y2 = model.forward(&x2).unwrap();
        assert_eq!(y.row(0), y2.row(0));
    }

    #[test]
    fn single_node_is_an_mlp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let adj = AdjacencyMatrix::new(AdjacencyKind::Dense, DMatrix::zeros(1, 1));
        let model = ForecastModel::new(task(), small(), &adj, &mut rng).unwrap();
        let x = random_input(&mut rng, 1, 6);
        let w = &model.weights;
        let mut h = (&x * &w.w_in + &w.b_in).map(|v| v.max(0.0));
        for layer in &w.layers {
            h = (&h * &layer.w_self + &layer.bias).map(|v| v.max(0.0));
        }
        let y = &h * &w.w_out + &w.b_out;
        assert!((model.forward(&x).unwrap() - y).norm() < 1e-14);
        assert!(model.sensitivity(&x, 0, 0).unwrap() > 0.0);
    }

    #[test]
    fn row_stochastic_averaging_preserves_constants() {
        // one linear layer: with inputs equal across nodes, a row-stochastic
        // operator maps the constant state to itself, so every node agrees
        let n = 4;
        let w = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / 3.0 });
        let adj = AdjacencyMatrix::new(AdjacencyKind::Dense, w);
        let cfg = ModelConfig {
            layers: 1,
            latent: 3,
            static_dim: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut model = ForecastModel::new(task(), cfg, &adj, &mut rng).unwrap();
        // keep pre-activations positive so relu acts linearly
        model.weights.w_in = model.weights.w_in.abs();
        for layer in &mut model.weights.layers {
            layer.w_neighbor = layer.w_neighbor.abs();
            layer.w_self = layer.w_self.abs();
        }
        let row: Vec<f64> = (0..6).map(|k| 0.1 + k as f64 * 0.05).collect();
        let x = DMatrix::from_fn(n, 6, |_, c| row[c]);
        let y = model.forward(&x).unwrap();
        for i in 1..n {
            assert!((y.row(i) - y.row(0)).norm() < 1e-14);
        }
    }

    #[test]
    fn path_receptive_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 7;
        let topo = ForecastModel::new(task(), small(), &chain_topology(n), &mut rng).unwrap();
        let x = random_input(&mut rng, n, 6);
        assert_eq!(topo.sensitivity(&x, 0, 6).unwrap(), 0.0);
        assert_eq!(topo.sensitivity(&x, 6, 0).unwrap(), 0.0);
        let dense_w = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / 6.0 });
        let dense = ForecastModel::new(
            task(),
            small(),
            &AdjacencyMatrix::new(AdjacencyKind::Dense, dense_w),
            &mut rng,
        )
        .unwrap();
        assert!(dense.sensitivity(&x, 0, 6).unwrap() > 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut nonzero = 0;
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let model = ForecastModel::new(task(), small(), &chain_topology(n), &mut rng).unwrap();
            let x = random_input(&mut rng, n, 6);
            let (u, v) = (1, 2);
            let jac = model.jacobian(&x, u, v).unwrap();
            let h = 1e-5;
            let mut fd = DMatrix::zeros(2, 6);
            for c in 0..6 {
                let mut xp = x.clone();
                xp[(v, c)] += h;
                let mut xm = x.clone();
                xm[(v, c)] -= h;
                let diff = (model.forward(&xp).unwrap() - model.forward(&xm).unwrap()) / (2.0 * h);
                for k in 0..2 {
                    fd[(k, c)] = diff[(u, k)];
                }
            }
            let scale = jac.norm().max(fd.norm());
            if scale < 1e-12 {
                // every relu on the path is inactive
                continue;
            }
            nonzero += 1;
            let rel = (&jac - &fd).norm() / scale;
            assert!(rel < 1e-4, "seed {seed}: relative error {rel}");
        }
        assert!(nonzero >= 4);
    }

    #[test]
    fn shape_mismatch() {
        let model = ForecastModel::zeros(task(), small(), &AdjacencyMatrix::isolated(3)).unwrap();
        assert!(matches!(
            model.forward(&DMatrix::zeros(2, 6)),
            Err(GnnError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn flatten_assign_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let adj = AdjacencyMatrix::new(AdjacencyKind::Learned, DMatrix::from_element(3, 3, 0.5));
        let model = ForecastModel::new(task(), small(), &adj, &mut rng).unwrap();
        let flat = model.weights.flatten();
        assert_eq!(flat.len(), model.weights.len());
        let mut other = model.weights.zeros_like();
        other.assign(&flat);
        assert_eq!(other, model.weights);
    }

    #[test]
    fn learned_operator_starts_at_given_weights() {
        let w = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        let adj = AdjacencyMatrix::new(AdjacencyKind::Learned, w.clone());
        let model = ForecastModel::zeros(task(), small(), &adj).unwrap();
        assert!((model.operator() - w).norm() < 1e-15);
    }
}
