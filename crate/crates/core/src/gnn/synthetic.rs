use chrono::{Duration, TimeZone, Utc};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BasinData, GnnError};
use crate::graph::{build_network, topological_distances, Edge, RiverNetwork};
use crate::preprocess::GaugeSeries;

/// Knobs of the synthetic rainfall-runoff generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub hours: usize,
    /// Flood-wave celerity; reach lag is `ceil(length / velocity)` hours.
    pub velocity_kmh: f64,
    pub length_range_km: (f64, f64),
    /// Chance per hour that a storm starts.
    pub storm_probability: f64,
    pub storm_duration_h: (usize, usize),
    /// Mean peak intensity, mm/h.
    pub mean_intensity: f64,
    /// Spatial decay length of a storm along the channel network, km.
    pub storm_radius_km: f64,
    /// Linear-reservoir coefficient of each reach.
    pub routing_range: (f64, f64),
    /// Linear-reservoir coefficient of each local catchment.
    pub runoff_range: (f64, f64),
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            hours: 4000,
            velocity_kmh: 3.0,
            length_range_km: (5.0, 40.0),
            storm_probability: 0.03,
            storm_duration_h: (2, 10),
            mean_intensity: 4.0,
            storm_radius_km: 40.0,
            routing_range: (0.3, 0.9),
            runoff_range: (0.05, 0.3),
        }
    }
}

/// Synthetic river basin with routed discharge at every gauge.
#[derive(Debug, Clone)]
pub struct SyntheticBasin {
    pub network: RiverNetwork,
    /// Reach reservoir coefficient in (0, 1], aligned with `network.edges()`.
    pub routing: Vec<f64>,
    /// Reach travel time in hours, aligned with `network.edges()`.
    pub lags: Vec<usize>,
    /// T × N rainfall, mm/h.
    pub rainfall: DMatrix<f64>,
    /// T × N local runoff entering at each gauge.
    pub local_runoff: DMatrix<f64>,
    /// T × N discharge.
    pub discharge: DMatrix<f64>,
}

/// Random river tree on stations `0..n` with outlet 0.
///
/// Station `i` drains into `i - 1` half of the time (growing a main stem)
/// and into a uniformly chosen earlier station otherwise.
pub fn random_river_tree(n: usize, rng: &mut impl Rng, length_range_km: (f64, f64)) -> RiverNetwork {
    let edges: Vec<Edge> = (1..n)
        .map(|i| {
            let parent = if rng.random_bool(0.5) {
                i - 1
            } else {
                rng.random_range(0..i)
            };
            let length = rng.random_range(length_range_km.0..=length_range_km.1);
            let drop = rng.random_range(1.0..50.0);
            Edge::new(i as u64, parent as u64, length, drop)
        })
        .collect();
    build_network(0..n as u64, edges).expect("random tree is valid")
}

pub fn generate_basin(size: usize, seed: u64) -> Result<SyntheticBasin, GnnError> {
    generate_basin_with(size, seed, &SyntheticConfig::default())
}

/// Generates a basin: random tree, storm rainfall, local linear-reservoir
/// runoff and lagged linear-reservoir routing along every reach.
///
/// Routing conserves mass, so over long runs the outlet discharge averages
/// the sum of all local runoff.
pub fn generate_basin_with(size: usize, seed: u64, config: &SyntheticConfig) -> Result<SyntheticBasin, GnnError> {
    if size < 2 {
        return Err(GnnError::InvalidConfig(format!(
            "basin needs at least 2 stations, got {size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let network = random_river_tree(size, &mut rng, config.length_range_km);
    let n = network.len();
    let t_len = config.hours;
    let dist = topological_distances(&network);

    let mut rainfall = DMatrix::zeros(t_len, n);
    let mut t = 0;
    while t < t_len {
        if rng.random_bool(config.storm_probability) {
            let duration = rng.random_range(config.storm_duration_h.0..=config.storm_duration_h.1);
            let center = rng.random_range(0..n);
            let peak = -config.mean_intensity * (1.0 - rng.random::<f64>()).ln();
            for step in 0..duration.min(t_len - t) {
                // triangular hyetograph
                let shape = 1.0 - ((2 * step + 1) as f64 / duration as f64 - 1.0).abs();
                for j in 0..n {
                    let d = dist.get(center, j);
                    let footprint = (-(d * d) / (2.0 * config.storm_radius_km.powi(2))).exp();
                    rainfall[(t + step, j)] += peak * shape * footprint;
                }
            }
        }
        t += 1;
    }

    let area: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
    let runoff_k: Vec<f64> = (0..n)
        .map(|_| rng.random_range(config.runoff_range.0..=config.runoff_range.1))
        .collect();
    let mut local_runoff = DMatrix::zeros(t_len, n);
    for j in 0..n {
        let mut state = 0.0;
        for t in 0..t_len {
            state = (1.0 - runoff_k[j]) * state + runoff_k[j] * area[j] * rainfall[(t, j)];
            local_runoff[(t, j)] = state;
        }
    }

    let routing: Vec<f64> = network
        .edges()
        .iter()
        .map(|_| rng.random_range(config.routing_range.0..=config.routing_range.1))
        .collect();
    let lags: Vec<usize> = network
        .edges()
        .iter()
        .map(|e| ((e.stream_length_km / config.velocity_kmh).ceil() as usize).max(1))
        .collect();

    let mut discharge = local_runoff.clone();
    let order = network.topological_order().expect("tree is acyclic");
    let edges: Vec<(usize, usize)> = network.indexed_edges().map(|(s, d, _)| (s, d)).collect();
    for &node in &order {
        // every upstream station precedes `node` in the order, so its
        // discharge is final here
        for (k, &(src, dst)) in edges.iter().enumerate() {
            if dst != node {
                continue;
            }
            let (c, lag) = (routing[k], lags[k]);
            let mut reach = 0.0;
            for t in 0..t_len {
                let inflow = if t >= lag { discharge[(t - lag, src)] } else { 0.0 };
                reach = (1.0 - c) * reach + c * inflow;
                discharge[(t, node)] += reach;
            }
        }
    }

    Ok(SyntheticBasin {
        network,
        routing,
        lags,
        rainfall,
        local_runoff,
        discharge,
    })
}

impl SyntheticBasin {
    pub fn len(&self) -> usize {
        self.discharge.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.discharge.nrows() == 0
    }

    fn timestamps(&self) -> Vec<chrono::DateTime<Utc>> {
        let t0 = Utc.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).unwrap();
        (0..self.len()).map(|k| t0 + Duration::hours(k as i64)).collect()
    }

    /// Discharge and rainfall channels in network node order.
    pub fn to_basin_data(&self) -> BasinData {
        BasinData::new(
            self.network.nodes().to_vec(),
            vec!["discharge".into(), "precip".into()],
            vec![self.discharge.clone(), self.rainfall.clone()],
            self.timestamps(),
        )
        .expect("consistent shapes")
    }

    /// Per-station series with a `precip` feature channel.
    pub fn to_gauge_series(&self) -> Vec<GaugeSeries> {
        let ts = self.timestamps();
        self.network
            .nodes()
            .iter()
            .enumerate()
            .map(|(j, &id)| {
                let mut features = std::collections::BTreeMap::new();
                features.insert("precip".to_string(), self.rainfall.column(j).iter().copied().collect());
                GaugeSeries::new(
                    id,
                    ts.clone(),
                    self.discharge.column(j).iter().copied().collect(),
                    features,
                )
                .expect("equal lengths")
            })
            .collect()
    }
}
