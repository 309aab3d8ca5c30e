//! Experiment harness: sample source-target pairs, run each configured
//! algorithm a fixed number of times per pair, and aggregate runtime and
//! nodes-expanded statistics into a report.
//!
//! Pairs are independent, so with the `parallel` feature they fan out across
//! rayon workers; all runs of a single (pair, algorithm) cell stay sequential
//! on one worker and are timed in isolation. Everything except wall time is
//! deterministic per seed, parallel or not.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::SystemTime;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    largest_navigable_component, load_network, ComponentError, LoadError, LoadOptions, NodeId,
    RoadGraph,
};
use crate::netgen::{generate, GenError, GenSpec};
use crate::search::{astar, dijkstra, HeuristicSpec, SearchError, SearchResult};

/// Relative tolerance for cross-algorithm cost agreement.
pub const COST_AGREEMENT_REL_TOL: f64 = 1e-9;

/// Where the experiment's network comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    Files { nodes: PathBuf, edges: PathBuf },
    Generated(GenSpec),
}

/// One algorithm configuration. `AStar { k: 0 }` is standard A* with the
/// plain metric heuristic; k >= 1 selects the k-step look-ahead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AlgorithmSpec {
    Dijkstra,
    AStar { k: u32 },
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Dijkstra => "Dijkstra".to_string(),
            AlgorithmSpec::AStar { k: 0 } => "Standard A*".to_string(),
            AlgorithmSpec::AStar { k } => format!("A* k={k}"),
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self {
            AlgorithmSpec::Dijkstra => None,
            AlgorithmSpec::AStar { k } => Some(*k),
        }
    }

    pub fn heuristic(&self) -> Option<HeuristicSpec> {
        match self {
            AlgorithmSpec::Dijkstra => None,
            AlgorithmSpec::AStar { k: 0 } => Some(HeuristicSpec::Euclidean),
            AlgorithmSpec::AStar { k } => Some(HeuristicSpec::Lookahead { k: *k }),
        }
    }
}

impl std::fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgorithmSpec::Dijkstra => write!(f, "dijkstra"),
            AlgorithmSpec::AStar { k } => write!(f, "astar:{k}"),
        }
    }
}

impl std::str::FromStr for AlgorithmSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("dijkstra") {
            return Ok(AlgorithmSpec::Dijkstra);
        }
        if let Some(k) = s.strip_prefix("astar:") {
            let k = k.parse().map_err(|_| format!("bad look-ahead depth in {s:?}"))?;
            return Ok(AlgorithmSpec::AStar { k });
        }
        Err(format!("unknown algorithm {s:?}; expected \"dijkstra\" or \"astar:<k>\""))
    }
}

impl From<AlgorithmSpec> for String {
    fn from(a: AlgorithmSpec) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for AlgorithmSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Dijkstra plus A* for every k from 0 to `k_max`, the full comparison set.
pub fn standard_algorithms(k_max: u32) -> Vec<AlgorithmSpec> {
    std::iter::once(AlgorithmSpec::Dijkstra)
        .chain((0..=k_max).map(|k| AlgorithmSpec::AStar { k }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Distinct ordered pairs sampled uniformly with the experiment seed.
    Random,
    /// One deliberately chosen pair, by external node ids.
    Fixed { s: u64, t: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub algorithms: Vec<AlgorithmSpec>,
    pub num_pairs: u32,
    pub runs_per_pair: u32,
    pub seed: u64,
    pub pair_mode: PairMode,
    /// Reject networks with arcs cheaper than the metric distance.
    #[serde(default)]
    pub strict: bool,
}

impl ExperimentConfig {
    pub fn new(network: NetworkSource, num_pairs: u32, runs_per_pair: u32, seed: u64) -> Self {
        ExperimentConfig {
            network,
            algorithms: standard_algorithms(10),
            num_pairs,
            runs_per_pair,
            seed,
            pair_mode: PairMode::Random,
            strict: false,
        }
    }

    /// Reads a config from a TOML or JSON file (decided by extension, with
    /// a fallback attempt at the other format).
    pub fn from_file(path: &std::path::Path) -> Result<ExperimentConfig, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let file: ConfigFile = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| BenchError::InvalidConfig(format!("{}: {e}", path.display())))?,
            _ => match toml::from_str(&text) {
                Ok(cfg) => cfg,
                Err(toml_err) => serde_json::from_str(&text).map_err(|_| {
                    BenchError::InvalidConfig(format!("{}: {toml_err}", path.display()))
                })?,
            },
        };
        file.into_config()
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.num_pairs < 1 {
            return Err(BenchError::InvalidConfig("num_pairs must be >= 1".into()));
        }
        if self.runs_per_pair < 1 {
            return Err(BenchError::InvalidConfig("runs_per_pair must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::InvalidConfig("algorithm list is empty".into()));
        }
        if matches!(self.pair_mode, PairMode::Fixed { .. }) && self.num_pairs != 1 {
            return Err(BenchError::InvalidConfig(
                "a fixed pair implies num_pairs = 1".into(),
            ));
        }
        Ok(())
    }

    /// Algorithms in report order: Dijkstra first, then A* by ascending k,
    /// duplicates dropped.
    fn ordered_algorithms(&self) -> Vec<AlgorithmSpec> {
        let mut algorithms = self.algorithms.clone();
        algorithms.sort();
        algorithms.dedup();
        algorithms
    }
}

/// On-disk config shape: accepts either an explicit algorithm list or a
/// `k_max` shorthand for the standard comparison set.
#[derive(Deserialize)]
struct ConfigFile {
    network: NetworkSource,
    #[serde(default)]
    algorithms: Option<Vec<AlgorithmSpec>>,
    #[serde(default)]
    k_max: Option<u32>,
    num_pairs: u32,
    runs_per_pair: u32,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    pair: Option<FixedPair>,
    #[serde(default)]
    strict: bool,
}

#[derive(Deserialize)]
struct FixedPair {
    s: u64,
    t: u64,
}

impl ConfigFile {
    fn into_config(self) -> Result<ExperimentConfig, BenchError> {
        let algorithms = match (self.algorithms, self.k_max) {
            (Some(_), Some(_)) => {
                return Err(BenchError::InvalidConfig(
                    "set either algorithms or k_max, not both".into(),
                ))
            }
            (Some(list), None) => list,
            (None, k_max) => standard_algorithms(k_max.unwrap_or(10)),
        };
        Ok(ExperimentConfig {
            network: self.network,
            algorithms,
            num_pairs: self.num_pairs,
            runs_per_pair: self.runs_per_pair,
            seed: self.seed,
            pair_mode: match self.pair {
                Some(FixedPair { s, t }) => PairMode::Fixed { s, t },
                None => PairMode::Random,
            },
            strict: self.strict,
        })
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("network has {available} nodes; need at least 2 to sample a pair")]
    TooFewNodes { available: usize },
    #[error("{requested} distinct pairs requested but only {possible} exist")]
    TooManyPairs { requested: u32, possible: u64 },
    #[error("node id {0} is not in the navigable component")]
    UnknownNode(u64),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
}

/// `n` distinct ordered pairs with s != t, uniform per seed. The graph is
/// expected to be preprocessed, so every pair is solvable.
pub fn sample_pairs(
    g: &RoadGraph,
    n: u32,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>, BenchError> {
    let v = g.num_nodes();
    if v < 2 {
        return Err(BenchError::TooFewNodes { available: v });
    }
    let possible = (v as u64) * (v as u64 - 1);
    if n as u64 > possible {
        return Err(BenchError::TooManyPairs { requested: n, possible });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(n as usize);
    while pairs.len() < n as usize {
        let s = rng.random_range(0..v);
        let t = rng.random_range(0..v);
        if s != t && seen.insert((s, t)) {
            pairs.push((NodeId::new(s), NodeId::new(t)));
        }
    }
    Ok(pairs)
}

/// Aggregates for one (pair, algorithm) cell. Costs, node counts, and
/// heuristic counters are deterministic; only the runtimes vary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairCell {
    pub cost: f64,
    pub nodes_expanded: u64,
    pub heuristic_evals: u64,
    pub heuristic_steps: u64,
    pub runtimes_s: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgorithmRow {
    pub algorithm: AlgorithmSpec,
    pub label: String,
    pub k: Option<u32>,
    pub mean_runtime_s: f64,
    pub median_runtime_s: f64,
    pub mean_nodes_expanded: f64,
    pub mean_heuristic_evals: f64,
    pub mean_heuristic_steps: f64,
    pub per_pair: Vec<PairCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    /// Some pair saw algorithms disagree on path cost.
    Failed { details: String },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct ReportMetadata {
    pub timestamp_unix_s: u64,
    /// Hardware/OS note; absolute runtimes only make sense against it.
    pub host: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub config: ExperimentConfig,
    pub graph_nodes: usize,
    pub graph_arcs: usize,
    /// Sampled pairs as external id tuples, in evaluation order.
    pub pairs: Vec<(u64, u64)>,
    pub status: ReportStatus,
    pub rows: Vec<AlgorithmRow>,
}

impl ExperimentReport {
    pub fn is_failed(&self) -> bool {
        matches!(self.status, ReportStatus::Failed { .. })
    }

    /// Blanks the host/timestamp metadata and every timing sample so two
    /// reports from the same seed can be compared byte for byte.
    pub fn strip_volatile(&mut self) {
        self.metadata = ReportMetadata::default();
        for row in &mut self.rows {
            row.mean_runtime_s = 0.0;
            row.median_runtime_s = 0.0;
            for cell in &mut row.per_pair {
                cell.runtimes_s.clear();
            }
        }
    }
}

impl ExperimentConfig {
    fn build_graph(&self) -> Result<RoadGraph, BenchError> {
        let raw = match &self.network {
            NetworkSource::Files { nodes, edges } => {
                let options = LoadOptions { strict: self.strict, metric: None };
                load_network(nodes, edges, &options)?
            }
            NetworkSource::Generated(spec) => generate(spec)?,
        };
        Ok(largest_navigable_component(&raw)?)
    }
}

/// Runs the experiment, evaluating pairs in parallel when the crate was
/// built with the `parallel` feature.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    run(cfg, true)
}

/// Same experiment, pinned to a single thread regardless of features.
pub fn run_experiment_seq(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    run(cfg, false)
}

fn run(cfg: &ExperimentConfig, parallel: bool) -> Result<ExperimentReport, BenchError> {
    cfg.validate()?;
    let graph = cfg.build_graph()?;
    let pairs: Vec<(NodeId, NodeId)> = match cfg.pair_mode {
        PairMode::Random => sample_pairs(&graph, cfg.num_pairs, cfg.seed)?,
        PairMode::Fixed { s, t } => {
            let s = graph.resolve_external(s).ok_or(BenchError::UnknownNode(s))?;
            let t = graph.resolve_external(t).ok_or(BenchError::UnknownNode(t))?;
            vec![(s, t)]
        }
    };
    let algorithms = cfg.ordered_algorithms();

    // The timed region: searches only. Loading, component extraction, and
    // pair sampling above are all excluded from every timing sample.
    let cells = map_indices(pairs.len(), parallel, |p| {
        run_pair(&graph, &algorithms, cfg.runs_per_pair, pairs[p].0, pairs[p].1)
    });

    let mut status = ReportStatus::Ok;
    let mut per_algorithm: Vec<Vec<PairCell>> =
        algorithms.iter().map(|_| Vec::with_capacity(pairs.len())).collect();
    for (p, pair_cells) in cells.into_iter().enumerate() {
        let pair_cells = pair_cells?;
        let reference = pair_cells[0].cost;
        for (a, cell) in pair_cells.into_iter().enumerate() {
            let tol = COST_AGREEMENT_REL_TOL * reference.abs().max(cell.cost.abs()).max(1.0);
            if (cell.cost - reference).abs() > tol {
                if !matches!(status, ReportStatus::Failed { .. }) {
                    status = ReportStatus::Failed {
                        details: format!(
                            "pair {:?} cost mismatch: {} reports {}, {} reports {}",
                            (graph.external_id(pairs[p].0), graph.external_id(pairs[p].1)),
                            algorithms[0].label(),
                            reference,
                            algorithms[a].label(),
                            cell.cost,
                        ),
                    };
                }
            }
            per_algorithm[a].push(cell);
        }
    }

    let rows = algorithms
        .iter()
        .zip(per_algorithm)
        .map(|(&algorithm, per_pair)| {
            let runtimes: Vec<f64> =
                per_pair.iter().flat_map(|c| c.runtimes_s.iter().copied()).collect();
            AlgorithmRow {
                algorithm,
                label: algorithm.label(),
                k: algorithm.k(),
                mean_runtime_s: mean(&runtimes),
                median_runtime_s: median(&runtimes),
                mean_nodes_expanded: mean_by(&per_pair, |c| c.nodes_expanded as f64),
                mean_heuristic_evals: mean_by(&per_pair, |c| c.heuristic_evals as f64),
                mean_heuristic_steps: mean_by(&per_pair, |c| c.heuristic_steps as f64),
                per_pair,
            }
        })
        .collect();

    Ok(ExperimentReport {
        metadata: ReportMetadata {
            timestamp_unix_s: SystemTime::now()
                .duration_since(SystemTime::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            host: format!(
                "{}-{}, {} cpus",
                std::env::consts::OS,
                std::env::consts::ARCH,
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            ),
        },
        config: cfg.clone(),
        graph_nodes: graph.num_nodes(),
        graph_arcs: graph.num_arcs(),
        pairs: pairs
            .iter()
            .map(|&(s, t)| (graph.external_id(s), graph.external_id(t)))
            .collect(),
        status,
        rows,
    })
}

fn run_pair(
    g: &RoadGraph,
    algorithms: &[AlgorithmSpec],
    runs_per_pair: u32,
    s: NodeId,
    t: NodeId,
) -> Result<Vec<PairCell>, SearchError> {
    algorithms
        .iter()
        .map(|alg| {
            let mut runtimes = Vec::with_capacity(runs_per_pair as usize);
            let mut first: Option<SearchResult> = None;
            for _ in 0..runs_per_pair {
                let result = match alg.heuristic() {
                    None => dijkstra(g, s, t)?,
                    Some(h) => astar(g, s, t, &h)?,
                };
                runtimes.push(result.wall_time.as_secs_f64());
                match &first {
                    None => first = Some(result),
                    Some(f) => debug_assert_eq!(f.nodes_expanded, result.nodes_expanded),
                }
            }
            let first = first.expect("runs_per_pair >= 1");
            Ok(PairCell {
                cost: first.cost,
                nodes_expanded: first.nodes_expanded,
                heuristic_evals: first.heuristic_evals,
                heuristic_steps: first.heuristic_steps,
                runtimes_s: runtimes,
            })
        })
        .collect()
}

fn map_indices<T, F>(count: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..count).map(f).collect()
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn mean_by(cells: &[PairCell], f: impl Fn(&PairCell) -> f64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    cells.iter().map(f).sum::<f64>() / cells.len() as f64
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            other => Err(format!("unknown format {other:?}; expected csv, json, or table")),
        }
    }
}

/// Serializes the report. CSV carries the aggregate row per algorithm, JSON
/// mirrors the whole report, and the table is an aligned text rendering.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("algorithm,k,mean_runtime_s,mean_nodes_expanded\n");
            for row in &report.rows {
                let k = row.k.map(|k| k.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.label, k, row.mean_runtime_s, row.mean_nodes_expanded
                ));
            }
            out
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        ReportFormat::Table => {
            let mut out = String::new();
            match &report.status {
                ReportStatus::Ok => out.push_str("status: ok\n"),
                ReportStatus::Failed { details } => {
                    out.push_str(&format!("status: FAILED ({details})\n"))
                }
            }
            out.push_str(&format!(
                "network: {} nodes, {} arcs; {} pairs x {} runs\n",
                report.graph_nodes,
                report.graph_arcs,
                report.pairs.len(),
                report.config.runs_per_pair
            ));
            out.push_str(&format!(
                "{:<14} {:>16} {:>18} {:>22}\n",
                "algorithm", "mean runtime (s)", "median runtime (s)", "mean nodes expanded"
            ));
            for row in &report.rows {
                out.push_str(&format!(
                    "{:<14} {:>16.6} {:>18.6} {:>22.2}\n",
                    row.label, row.mean_runtime_s, row.median_runtime_s, row.mean_nodes_expanded
                ));
            }
            out
        }
    }
}

/// Plot-friendly CSV of runtime and nodes expanded as a function of k, with
/// Dijkstra attached as an annotated comment row (it has no k).
pub fn emit_plot_data(report: &ExperimentReport) -> String {
    let mut out = String::from("k,mean_runtime_s,mean_nodes_expanded\n");
    for row in &report.rows {
        if let Some(k) = row.k {
            out.push_str(&format!("{k},{},{}\n", row.mean_runtime_s, row.mean_nodes_expanded));
        }
    }
    for row in &report.rows {
        if row.k.is_none() {
            out.push_str(&format!(
                "# {},{},{}\n",
                row.label, row.mean_runtime_s, row.mean_nodes_expanded
            ));
        }
    }
    out
}
