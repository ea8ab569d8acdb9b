//! Seeded inputs shared by the benchmarks in `benches/`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rivergraph::gnn::{random_river_tree, ForecastModel, ForecastTask, ModelConfig};
use rivergraph::{
    build_adjacency, topological_distances, AdjacencyKind, AdjacencyMatrix, DistanceMatrix, RewireConfig, RiverNetwork,
    Sigma,
};

pub fn river(n: usize, seed: u64) -> (RiverNetwork, DistanceMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_river_tree(n, &mut rng, (5.0, 40.0));
    let d = topological_distances(&net);
    (net, d)
}

pub fn adjacency(n: usize, kind: AdjacencyKind, seed: u64) -> AdjacencyMatrix {
    let (net, d) = river(n, seed);
    build_adjacency(&net, &d, &RewireConfig::new(kind, Sigma::Auto)).expect("tree adjacency")
}

/// Paper-sized forecaster (24 h history and horizon, 32-wide latent) with
/// one random input window.
pub fn forecaster(n: usize, kind: AdjacencyKind, seed: u64) -> (ForecastModel, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let task = ForecastTask {
        alpha_hist: 24,
        beta_horizon: 24,
        feature_dim: 2,
    };
    let model =
        ForecastModel::new(task, ModelConfig::default(), &adjacency(n, kind, seed), &mut rng).expect("valid model");
    let x = DMatrix::from_fn(n, model.input_width(), |_, _| rng.random_range(-1.0..1.0));
    (model, x)
}
