use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::Serialize;

use rivergraph::gnn::{
    generate_basin_with, run_experiment, save_checkpoint, write_metrics_csv, BasinData, ExperimentConfig, ForecastTask,
    ModelConfig, Optimizer, SyntheticConfig, TrainConfig,
};
use rivergraph::graph::io::{read_network, write_edges, write_nodes, NodeTable};
use rivergraph::preprocess::io::{parse_timestamp, read_gauge_dir, write_gauge_csv, write_qc_reports, ColumnMap};
use rivergraph::preprocess::{extract_subgraph, quality_control, GaugeSeries, StudyPeriod};
use rivergraph::rewire::io::{read_adjacency, write_adjacency};
use rivergraph::rewire::resolve_sigma;
use rivergraph::{
    build_adjacency, resistance_report, topological_distances, AdjacencyKind, LaplacianMode, RewireConfig, Sigma,
};

use crate::config::FileConfig;
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;
use crate::{QcArgs, ResistArgs, RewireArgs, SynthArgs, TrainArgs};

/// Effective global settings after merging flags and config file.
pub struct Context {
    pub config: FileConfig,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub threads: usize,
    pub started: (DateTime<Utc>, Instant),
}

impl Context {
    fn manifest(&self, command: &str, out: &Path) -> ManifestBuilder {
        ManifestBuilder::new(
            command,
            self.config_path.as_deref(),
            out,
            self.seed,
            self.threads,
            self.started,
        )
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))
}

fn parse_flag<T: std::str::FromStr>(name: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| CliError::Input(format!("invalid {name} {raw:?}: {e}")))
}

fn parse_time(name: &str, raw: &str) -> Result<DateTime<Utc>> {
    parse_timestamp(raw).ok_or_else(|| CliError::Input(format!("invalid {name} timestamp {raw:?}")))
}

fn ensure_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{what} {} not found", path.display())))
    }
}

#[derive(Serialize)]
struct QcParams {
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    columns: ColumnMap,
    stations_in_network: usize,
    gauges_found: usize,
    passed: usize,
}

pub fn qc(ctx: &Context, args: &QcArgs) -> Result<()> {
    prepare_out(&args.out)?;
    let section = &ctx.config.qc;
    let defaults = ColumnMap::default();
    let columns = ColumnMap {
        timestamp: args
            .timestamp_column
            .clone()
            .or(section.timestamp_column.clone())
            .unwrap_or(defaults.timestamp),
        discharge: args
            .discharge_column
            .clone()
            .or(section.discharge_column.clone())
            .unwrap_or(defaults.discharge),
    };
    let (net, table) = read_network(&args.edges, args.nodes.as_deref())?;
    if !args.gauges.is_dir() {
        return Err(CliError::Input(format!(
            "gauge directory {} not found",
            args.gauges.display()
        )));
    }
    let series = read_gauge_dir(&args.gauges, &columns)?;
    if series.is_empty() {
        return Err(CliError::Input(format!(
            "no stations found in {}",
            args.gauges.display()
        )));
    }

    let start = match args.start.as_deref().or(section.start.as_deref()) {
        Some(raw) => parse_time("start", raw)?,
        None => series
            .iter()
            .flat_map(|s| s.timestamps.iter())
            .min()
            .copied()
            .ok_or_else(|| CliError::Input(format!("no observations in {}", args.gauges.display())))?,
    };
    let end = match args.end.as_deref().or(section.end.as_deref()) {
        Some(raw) => parse_time("end", raw)?,
        None => {
            series
                .iter()
                .flat_map(|s| s.timestamps.iter())
                .max()
                .copied()
                .unwrap_or(start)
                + Duration::hours(1)
        }
    };
    let period = StudyPeriod::new(start, end).map_err(|e| CliError::Input(e.to_string()))?;

    let by_station: BTreeMap<_, &GaugeSeries> = series.iter().map(|s| (s.station, s)).collect();
    for id in by_station.keys().filter(|id| !net.contains(**id)) {
        log::warn!("gauge {id} is not in the network, ignored");
    }
    let reports: Vec<_> = net
        .nodes()
        .par_iter()
        .map(|&id| match by_station.get(&id) {
            Some(s) => quality_control(s, &period),
            None => {
                log::warn!("station {id} has no gauge file");
                quality_control(&GaugeSeries::hourly(id, start, Vec::new()), &period)
            }
        })
        .collect();
    let keep: BTreeSet<_> = reports.iter().filter(|r| r.passed).map(|r| r.station).collect();
    for r in reports.iter().filter(|r| !r.passed) {
        log::info!(
            "station {} failed QC: {} negative values, {} missing hours",
            r.station,
            r.negative_count,
            r.missing_hours
        );
    }
    let filtered = extract_subgraph(&net, &keep).map_err(CliError::compute)?;

    write_qc_reports(&args.out.join("qc_report.json"), &reports)?;
    write_edges(&args.out.join("network.csv"), &filtered)?;
    let mut table = table.unwrap_or_else(|| NodeTable {
        attribute_columns: Vec::new(),
        rows: net.nodes().iter().map(|&id| (id, Vec::new())).collect(),
    });
    table.retain(|id| keep.contains(&id));
    write_nodes(&args.out.join("nodes.csv"), &table)?;
    log::info!(
        "{} of {} stations passed, {} reaches remain",
        keep.len(),
        net.len(),
        filtered.edges().len()
    );

    let mut m = ctx.manifest("qc", &args.out);
    m.input("edges", &args.edges).input("gauges", &args.gauges);
    if let Some(nodes) = &args.nodes {
        m.input("nodes", nodes);
    }
    m.parameters(QcParams {
        start,
        end,
        columns,
        stations_in_network: net.len(),
        gauges_found: series.len(),
        passed: keep.len(),
    })
    .output("qc_report.json")
    .output("network.csv")
    .output("nodes.csv");
    m.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct RewireParams {
    kind: AdjacencyKind,
    sigma: String,
    sigma_km: Option<f64>,
    prune: f64,
    n: usize,
    nnz: usize,
}

pub fn rewire(ctx: &Context, args: &RewireArgs) -> Result<()> {
    prepare_out(&args.out)?;
    let section = &ctx.config.rewire;
    let kind: AdjacencyKind = match args.kind.as_deref().or(section.kind.as_deref()) {
        Some(raw) => parse_flag("kind", raw)?,
        None => AdjacencyKind::Dense,
    };
    let sigma: Sigma = match args.sigma.as_deref().or(section.sigma.as_deref()) {
        Some(raw) => parse_flag("sigma", raw)?,
        None => Sigma::Auto,
    };
    let prune = args.prune.or(section.prune).unwrap_or(0.0);
    let config = RewireConfig {
        sigma,
        kind,
        epsilon_prune: prune,
    };
    config.validate().map_err(|e| CliError::Input(e.to_string()))?;

    let (net, _) = read_network(&args.edges, args.nodes.as_deref())?;
    let distances = topological_distances(&net);
    let adj = build_adjacency(&net, &distances, &config).map_err(CliError::compute)?;
    let sigma_km = match kind {
        AdjacencyKind::Isolated => None,
        _ => Some(resolve_sigma(&distances, sigma).map_err(CliError::compute)?),
    };
    let meta = write_adjacency(&args.out.join("adjacency.csv"), &adj, net.nodes(), sigma_km)?;

    let mut m = ctx.manifest("rewire", &args.out);
    m.input("edges", &args.edges);
    if let Some(nodes) = &args.nodes {
        m.input("nodes", nodes);
    }
    m.parameters(RewireParams {
        kind,
        sigma: sigma.to_string(),
        sigma_km,
        prune,
        n: meta.n,
        nnz: meta.nnz,
    })
    .output("adjacency.csv")
    .output("adjacency.json");
    m.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct ResistParams {
    mode: LaplacianMode,
    kind: AdjacencyKind,
    n: usize,
    component_size: usize,
    mean: f64,
}

pub fn resist(ctx: &Context, args: &ResistArgs) -> Result<()> {
    prepare_out(&args.out)?;
    let mode: LaplacianMode = match args.mode.as_deref().or(ctx.config.resist.mode.as_deref()) {
        Some(raw) => parse_flag("mode", raw)?,
        None => LaplacianMode::Symmetric,
    };
    ensure_file(&args.adjacency, "adjacency file")?;
    let (adj, _) = read_adjacency(&args.adjacency, AdjacencyKind::Dense)?;
    let report = resistance_report(&adj, mode).map_err(CliError::compute)?;
    report.write_json(&args.out.join("resistance.json"))?;
    report.write_histogram_csv(&args.out.join("resistance_histogram.csv"))?;

    let mut m = ctx.manifest("resist", &args.out);
    m.input("adjacency", &args.adjacency)
        .parameters(ResistParams {
            mode,
            kind: adj.kind,
            n: report.n,
            component_size: report.component_size,
            mean: report.mean,
        })
        .output("resistance.json")
        .output("resistance_histogram.csv");
    m.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct TrainParams<'a> {
    experiment: &'a ExperimentConfig,
    columns: ColumnMap,
    kind: AdjacencyKind,
    nodes: usize,
    hours: usize,
    final_loss: f64,
    mean_nse: f64,
}

fn train_config(ctx: &Context, args: &TrainArgs) -> Result<ExperimentConfig> {
    let s = &ctx.config.train;
    let base = ExperimentConfig::default();
    let optimizer = match args.optimizer.as_deref().or(s.optimizer.as_deref()) {
        None => base.train.optimizer,
        Some("adam") => Optimizer::Adam,
        Some("gd") | Some("gradient-descent") => Optimizer::GradientDescent,
        Some(other) => {
            return Err(CliError::Input(format!(
                "unknown optimizer {other:?}, expected adam or gd"
            )))
        }
    };
    let config = ExperimentConfig {
        task: ForecastTask {
            alpha_hist: args.alpha.or(s.alpha).unwrap_or(base.task.alpha_hist),
            beta_horizon: args.beta.or(s.beta).unwrap_or(base.task.beta_horizon),
            feature_dim: base.task.feature_dim,
        },
        model: ModelConfig {
            layers: args.layers.or(s.layers).unwrap_or(base.model.layers),
            latent: args.latent.or(s.latent).unwrap_or(base.model.latent),
            static_dim: 0,
        },
        train: TrainConfig {
            lr: args.lr.or(s.lr).unwrap_or(base.train.lr),
            weight_decay: s.weight_decay.unwrap_or(base.train.weight_decay),
            lr_halving_epochs: s.lr_halving_epochs.clone().unwrap_or(base.train.lr_halving_epochs),
            clip_norm: s.clip_norm.unwrap_or(base.train.clip_norm),
            epochs: args.epochs.or(s.epochs).unwrap_or(base.train.epochs),
            batch_size: args.batch_size.or(s.batch_size).unwrap_or(base.train.batch_size),
            seed: ctx.seed,
            optimizer,
        },
        train_fraction: args.train_fraction.or(s.train_fraction).unwrap_or(base.train_fraction),
        stride: args.stride.or(s.stride).unwrap_or(base.stride),
    };
    config.task.validate().map_err(|e| CliError::Input(e.to_string()))?;
    config.train.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(config)
}

pub fn train(ctx: &Context, args: &TrainArgs) -> Result<()> {
    prepare_out(&args.out)?;
    let mut config = train_config(ctx, args)?;
    let s = &ctx.config.train;
    let defaults = ColumnMap::default();
    let columns = ColumnMap {
        timestamp: s.timestamp_column.clone().unwrap_or(defaults.timestamp),
        discharge: s.discharge_column.clone().unwrap_or(defaults.discharge),
    };
    ensure_file(&args.adjacency, "adjacency file")?;
    let (adj, meta) = read_adjacency(&args.adjacency, AdjacencyKind::Dense)?;
    let series = read_gauge_dir(&args.gauges, &columns)?;
    if series.is_empty() {
        return Err(CliError::Input(format!(
            "no stations found in {}",
            args.gauges.display()
        )));
    }
    let data = BasinData::from_series(&meta.nodes, &series).map_err(|e| CliError::Input(e.to_string()))?;
    config.task.feature_dim = data.channels.len();
    let result = run_experiment(&data, &adj, &config).map_err(CliError::compute)?;

    let rows = result.rows();
    write_metrics_csv(&args.out.join("metrics.csv"), &rows)?;
    save_checkpoint(&args.out.join("checkpoint.json"), &result.model, &meta.nodes)?;
    let mean_nse = result.nse_by_horizon.iter().sum::<f64>() / result.nse_by_horizon.len() as f64;
    let final_loss = *result
        .report
        .loss_curve
        .last()
        .expect("loss curve has the initial entry");
    log::info!("final training MAE {final_loss:.4}, mean test NSE {mean_nse:.4}");

    let mut m = ctx.manifest("train", &args.out);
    m.input("adjacency", &args.adjacency)
        .input("gauges", &args.gauges)
        .parameters(TrainParams {
            experiment: &config,
            columns,
            kind: adj.kind,
            nodes: data.n_nodes(),
            hours: data.len(),
            final_loss,
            mean_nse,
        })
        .output("metrics.csv")
        .output("checkpoint.json");
    m.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct SynthParams {
    size: usize,
    hours: usize,
}

pub fn synth(ctx: &Context, args: &SynthArgs) -> Result<()> {
    let size = args.size.or(ctx.config.synth.size).unwrap_or(8);
    let hours = args.hours.or(ctx.config.synth.hours).unwrap_or(2000);
    let gauges = args.out.join("gauges");
    prepare_out(&gauges)?;
    let basin = generate_basin_with(
        size,
        ctx.seed,
        &SyntheticConfig {
            hours,
            ..SyntheticConfig::default()
        },
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    write_edges(&args.out.join("edges.csv"), &basin.network)?;
    for s in basin.to_gauge_series() {
        write_gauge_csv(&gauges.join(format!("gauge_{}.csv", s.station)), &s)?;
    }
    let mut m = ctx.manifest("synth", &args.out);
    m.parameters(SynthParams { size, hours })
        .output("edges.csv")
        .output("gauges/");
    m.finish()?;
    Ok(())
}
