use std::collections::BTreeSet;

use rand::SeedableRng;

use rivergraph::gnn::{
    generate_basin_with, load_checkpoint, run_experiment, save_checkpoint, BasinData, ExperimentConfig, ForecastTask,
    ModelConfig, SyntheticConfig, TrainConfig,
};
use rivergraph::graph::io::{read_network, write_edges};
use rivergraph::preprocess::io::{read_gauge_dir, write_gauge_csv, ColumnMap};
use rivergraph::preprocess::{extract_subgraph, quality_control, StudyPeriod};
use rivergraph::rewire::io::{read_adjacency, write_adjacency};
use rivergraph::{
    build_adjacency, resistance_report, topological_distances, AdjacencyKind, LaplacianMode, RewireConfig, Sigma,
};

fn small_basin() -> rivergraph::gnn::SyntheticBasin {
    generate_basin_with(
        7,
        11,
        &SyntheticConfig {
            hours: 400,
            ..SyntheticConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn files_through_qc_and_rewire() {
    let dir = tempfile::tempdir().unwrap();
    let basin = small_basin();
    let edges = dir.path().join("edges.csv");
    write_edges(&edges, &basin.network).unwrap();
    let gauges = dir.path().join("gauges");
    std::fs::create_dir(&gauges).unwrap();
    let mut series = basin.to_gauge_series();
    // station 3 loses a reading
    series[3].discharge[10] = f64::NAN;
    for s in &series {
        write_gauge_csv(&gauges.join(format!("q{}.csv", s.station)), s).unwrap();
    }

    let (net, _) = read_network(&edges, None).unwrap();
    assert_eq!(net, basin.network);
    let back = read_gauge_dir(&gauges, &ColumnMap::default()).unwrap();
    assert_eq!(back.len(), 7);
    assert_eq!(back[0].timestamps, series[0].timestamps);
    assert!(back[3].discharge[10].is_nan());

    let period = StudyPeriod::new(
        series[0].timestamps[0],
        *series[0].timestamps.last().unwrap() + chrono::Duration::hours(1),
    )
    .unwrap();
    let reports: Vec<_> = back.iter().map(|s| quality_control(s, &period)).collect();
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.station).collect();
    assert_eq!(failed, vec![3]);
    assert_eq!(reports[3].missing_hours, 1);

    let keep: BTreeSet<_> = reports.iter().filter(|r| r.passed).map(|r| r.station).collect();
    let sub = extract_subgraph(&net, &keep).unwrap();
    assert_eq!(sub.len(), 6);
    let d_full = topological_distances(&net);
    let d_sub = topological_distances(&sub);
    for e in sub.edges() {
        let (i, j) = (net.index_of(e.src).unwrap(), net.index_of(e.dst).unwrap());
        assert!((e.stream_length_km - d_full.get(i, j)).abs() < 1e-9);
        let (a, b) = (sub.index_of(e.src).unwrap(), sub.index_of(e.dst).unwrap());
        assert!((d_sub.get(a, b) - d_full.get(i, j)).abs() < 1e-9);
    }

    let adj = build_adjacency(&sub, &d_sub, &RewireConfig::new(AdjacencyKind::Dense, Sigma::Auto)).unwrap();
    let csv = dir.path().join("adjacency.csv");
    write_adjacency(&csv, &adj, sub.nodes(), Some(1.0)).unwrap();
    let (read, meta) = read_adjacency(&csv, AdjacencyKind::Isolated).unwrap();
    assert_eq!(meta.kind, AdjacencyKind::Dense);
    assert_eq!(meta.nodes, sub.nodes());
    assert!((read.weights - &adj.weights).norm() < 1e-15);

    let topo = build_adjacency(&sub, &d_sub, &RewireConfig::new(AdjacencyKind::Topology, Sigma::Auto)).unwrap();
    let dense_mean = resistance_report(&adj, LaplacianMode::Symmetric).unwrap().mean;
    let topo_mean = resistance_report(&topo, LaplacianMode::Symmetric).unwrap().mean;
    assert!(dense_mean < topo_mean);
    resistance_report(&adj, LaplacianMode::RandomWalk).unwrap();
}

#[test]
fn train_checkpoint_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let basin = small_basin();
    let data = BasinData::from_series(basin.network.nodes(), &basin.to_gauge_series()).unwrap();
    assert_eq!(data.channels, vec!["discharge".to_string(), "precip".to_string()]);
    let d = topological_distances(&basin.network);
    let config = ExperimentConfig {
        task: ForecastTask {
            alpha_hist: 8,
            beta_horizon: 4,
            feature_dim: 2,
        },
        model: ModelConfig {
            layers: 2,
            latent: 8,
            static_dim: 0,
        },
        train: TrainConfig {
            epochs: 3,
            seed: 9,
            ..TrainConfig::default()
        },
        train_fraction: 0.7,
        stride: 3,
    };
    for kind in AdjacencyKind::ALL {
        let adj = build_adjacency(&basin.network, &d, &RewireConfig::new(kind, Sigma::Auto)).unwrap();
        let first = run_experiment(&data, &adj, &config).unwrap();
        let second = run_experiment(&data, &adj, &config).unwrap();
        assert_eq!(first.report.loss_curve, second.report.loss_curve, "{kind}");
        assert!(first.nse_by_horizon.iter().all(|v| v.is_finite()));

        let path = dir.path().join(format!("{kind}.json"));
        save_checkpoint(&path, &first.model, basin.network.nodes()).unwrap();
        let (model, nodes) = load_checkpoint(&path).unwrap();
        assert_eq!(nodes, basin.network.nodes());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x = nalgebra::DMatrix::from_fn(7, model.input_width(), |_, _| {
            rand::Rng::random_range(&mut rng, -1.0..1.0)
        });
        assert_eq!(model.forward(&x).unwrap(), first.model.forward(&x).unwrap());
    }
}
