//! Command-line front end: generate networks, route single pairs, run the
//! benchmark protocol, and validate implementations against the oracles.
//!
//! Exit codes: 0 success, 2 bad input, 3 no path, 4 failed report or
//! validation. Diagnostics go to stderr; stdout carries machine-readable
//! output only.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kstep_core::bench::{
    emit_plot_data, emit_report, run_experiment, standard_algorithms, BenchError,
    ExperimentConfig, NetworkSource, PairMode, ReportFormat,
};
use kstep_core::graph::{
    largest_navigable_component, load_network, LoadOptions, NodeId, RoadGraph,
    METRIC_TOLERANCE_M,
};
use kstep_core::netgen::{generate, GenKind, GenSpec};
use kstep_core::oracle::oracle_shortest;
use kstep_core::search::{
    astar_with, check_admissibility, dijkstra, HeuristicSpec, SearchError, SearchOptions,
    SearchResult,
};

#[derive(Parser)]
#[command(
    name = "kstep",
    version,
    about = "Shortest paths on Euclidean road networks: Dijkstra, A*, and k-step look-ahead"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic planar network as node/edge CSVs
    Gen(GenArgs),
    /// Find a shortest path between two node ids
    Route(RouteArgs),
    /// Run the benchmark protocol and emit a report
    Bench(BenchArgs),
    /// Check searches and heuristics against the brute-force oracles
    Validate(ValidateArgs),
}

/// Failures mapped onto the documented exit codes.
enum Failure {
    /// Exit 2: bad flags, bad files, bad config.
    Input(String),
    /// Exit 3: the target is unreachable.
    NoPath,
    /// Exit 4: a report or validation suite failed.
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NoPath => 3,
            Failure::Check(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) | Failure::Check(m) => m.clone(),
            Failure::NoPath => "no path between the requested nodes".to_string(),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Route(args) => cmd_route(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Grid,
    RandomGeometric,
}

#[derive(Args)]
struct GenArgs {
    /// Network family to generate
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Grid width (grid only)
    #[arg(long)]
    width: Option<u32>,
    /// Grid height (grid only)
    #[arg(long)]
    height: Option<u32>,
    /// Number of points (random-geometric only)
    #[arg(long)]
    n: Option<u32>,
    /// Connection radius in planar units (random-geometric only)
    #[arg(long)]
    radius: Option<f64>,
    /// Arc cost multiplier over straight-line length, >= 1
    #[arg(long, default_value_t = 1.2)]
    cost_factor: f64,
    /// Positional noise amplitude per axis
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Fraction of edges emitted one-way
    #[arg(long, default_value_t = 0.0)]
    oneway_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for nodes.csv and edges.csv
    #[arg(long)]
    out: PathBuf,
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = GenSpec {
        kind: match args.kind {
            KindArg::Grid => GenKind::Grid,
            KindArg::RandomGeometric => GenKind::RandomGeometric,
        },
        width: args.width,
        height: args.height,
        n: args.n,
        connect_radius: args.radius,
        cost_factor: args.cost_factor,
        jitter: args.jitter,
        seed: args.seed,
        oneway_fraction: args.oneway_fraction,
    };
    let graph = generate(&spec).map_err(input)?;
    std::fs::create_dir_all(&args.out).map_err(input)?;
    let nodes = args.out.join("nodes.csv");
    let edges = args.out.join("edges.csv");
    kstep_core::graph::export_network(&graph, &nodes, &edges).map_err(input)?;
    eprintln!(
        "wrote {} ({} nodes) and {} ({} arcs)",
        nodes.display(),
        graph.num_nodes(),
        edges.display(),
        graph.num_arcs()
    );
    Ok(())
}

#[derive(Args)]
struct NetworkArgs {
    /// Directory containing nodes.csv and edges.csv
    #[arg(long)]
    network: Option<PathBuf>,
    /// Node CSV (alternative to --network)
    #[arg(long, requires = "edges", conflicts_with = "network")]
    nodes: Option<PathBuf>,
    /// Edge CSV (alternative to --network)
    #[arg(long, requires = "nodes", conflicts_with = "network")]
    edges: Option<PathBuf>,
    /// Reject arcs cheaper than the metric distance between their endpoints
    #[arg(long)]
    strict: bool,
}

impl NetworkArgs {
    fn paths(&self) -> Result<(PathBuf, PathBuf), Failure> {
        match (&self.network, &self.nodes, &self.edges) {
            (Some(dir), None, None) => Ok((dir.join("nodes.csv"), dir.join("edges.csv"))),
            (None, Some(n), Some(e)) => Ok((n.clone(), e.clone())),
            _ => Err(Failure::Input(
                "specify a network with --network DIR or --nodes FILE --edges FILE".into(),
            )),
        }
    }

    fn load(&self) -> Result<RoadGraph, Failure> {
        let (nodes, edges) = self.paths()?;
        let options = LoadOptions { strict: self.strict, metric: None };
        let graph = load_network(&nodes, &edges, &options).map_err(input)?;
        if !self.strict {
            let violations = graph.metric_violations(METRIC_TOLERANCE_M);
            if !violations.is_empty() {
                eprintln!(
                    "warning: {} arc(s) cost less than the metric distance between their \
                     endpoints; metric heuristics may overestimate (use --strict to reject)",
                    violations.len()
                );
            }
        }
        Ok(graph)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Dijkstra,
    Astar,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicArg {
    Zero,
    Euclidean,
    Lookahead,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Table,
}

#[derive(Args)]
struct RouteArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Source node id (external)
    #[arg(long)]
    from: u64,
    /// Target node id (external)
    #[arg(long)]
    to: u64,
    #[arg(long, value_enum, default_value_t = AlgoArg::Astar)]
    algo: AlgoArg,
    /// Look-ahead depth for A*: 0 means the plain metric heuristic
    #[arg(long)]
    k: Option<u32>,
    /// Heuristic override; defaults to euclidean, or look-ahead when --k > 0
    #[arg(long, value_enum)]
    heuristic: Option<HeuristicArg>,
    /// Strict closed set: never re-expand a settled node, even if its cost
    /// improves. Look-ahead heuristics may then return slightly suboptimal
    /// paths.
    #[arg(long)]
    no_reopen: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

fn route_heuristic(args: &RouteArgs) -> Result<HeuristicSpec, Failure> {
    match (args.heuristic, args.k) {
        (Some(HeuristicArg::Zero), _) => Ok(HeuristicSpec::Zero),
        (Some(HeuristicArg::Euclidean), _) => Ok(HeuristicSpec::Euclidean),
        (Some(HeuristicArg::Lookahead), k) => Ok(HeuristicSpec::Lookahead { k: k.unwrap_or(1) }),
        (None, Some(0)) | (None, None) => Ok(HeuristicSpec::Euclidean),
        (None, Some(k)) => Ok(HeuristicSpec::Lookahead { k }),
    }
}

fn cmd_route(args: RouteArgs) -> Result<(), Failure> {
    let graph = args.network.load()?;
    let s = graph
        .resolve_external(args.from)
        .ok_or_else(|| Failure::Input(format!("node id {} not in the network", args.from)))?;
    let t = graph
        .resolve_external(args.to)
        .ok_or_else(|| Failure::Input(format!("node id {} not in the network", args.to)))?;

    let result = match args.algo {
        AlgoArg::Dijkstra => dijkstra(&graph, s, t),
        AlgoArg::Astar => {
            let h = route_heuristic(&args)?;
            astar_with(&graph, s, t, &h, SearchOptions { reopen: !args.no_reopen })
        }
    };
    let result = match result {
        Ok(r) => r,
        Err(SearchError::NoPath) => return Err(Failure::NoPath),
        Err(e) => return Err(input(e)),
    };
    print_route(&graph, s, &result, args.format);
    Ok(())
}

fn print_route(graph: &RoadGraph, s: NodeId, result: &SearchResult, format: FormatArg) {
    let mut nodes: Vec<u64> =
        result.path.nodes().map(|n| graph.external_id(n)).collect();
    if nodes.is_empty() {
        nodes.push(graph.external_id(s)); // source == target
    }
    let sequence =
        nodes.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    match format {
        FormatArg::Table => {
            println!("path: {sequence}");
            println!("cost_m: {}", result.cost);
            println!("nodes_expanded: {}", result.nodes_expanded);
            println!("heuristic_evals: {}", result.heuristic_evals);
            println!("wall_time_s: {}", result.wall_time.as_secs_f64());
        }
        FormatArg::Json => {
            let value = serde_json::json!({
                "path": nodes,
                "cost_m": result.cost,
                "nodes_expanded": result.nodes_expanded,
                "heuristic_evals": result.heuristic_evals,
                "wall_time_s": result.wall_time.as_secs_f64(),
            });
            println!("{value}");
        }
        FormatArg::Csv => {
            println!("path,cost_m,nodes_expanded,heuristic_evals,wall_time_s");
            println!(
                "{sequence},{},{},{},{}",
                result.cost,
                result.nodes_expanded,
                result.heuristic_evals,
                result.wall_time.as_secs_f64()
            );
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config file (TOML or JSON); exclusive with the flags below
    #[arg(
        long,
        conflicts_with_all = ["network", "nodes", "edges", "pairs", "runs", "k_max", "seed", "from", "to", "strict"]
    )]
    config: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkArgs,
    /// Number of random source-target pairs
    #[arg(long, default_value_t = 20)]
    pairs: u32,
    /// Timed runs per pair and algorithm
    #[arg(long, default_value_t = 1)]
    runs: u32,
    /// Largest look-ahead depth; algorithms are Dijkstra plus A* k=0..=k_max
    #[arg(long, default_value_t = 10)]
    k_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed source id: benchmark exactly one chosen pair
    #[arg(long, requires = "to")]
    from: Option<u64>,
    /// Fixed target id
    #[arg(long, requires = "from")]
    to: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Also write runtime/nodes-expanded curves as plot-ready CSV
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path).map_err(input)?,
        None => {
            let (nodes, edges) = args.network.paths()?;
            ExperimentConfig {
                network: NetworkSource::Files { nodes, edges },
                algorithms: standard_algorithms(args.k_max),
                num_pairs: if args.from.is_some() { 1 } else { args.pairs },
                runs_per_pair: args.runs,
                seed: args.seed,
                pair_mode: match (args.from, args.to) {
                    (Some(s), Some(t)) => PairMode::Fixed { s, t },
                    _ => PairMode::Random,
                },
                strict: args.network.strict,
            }
        }
    };

    let report = run_experiment(&config).map_err(|e| match e {
        BenchError::Search(SearchError::NoPath) => Failure::NoPath,
        other => input(other),
    })?;

    let format = match args.format {
        FormatArg::Csv => ReportFormat::Csv,
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Table => ReportFormat::Table,
    };
    let rendered = emit_report(&report, format);
    match &args.out {
        Some(path) => std::fs::write(path, rendered).map_err(input)?,
        None => print!("{rendered}"),
    }
    if let Some(path) = &args.plot_out {
        std::fs::write(path, emit_plot_data(&report)).map_err(input)?;
    }
    if report.is_failed() {
        return Err(Failure::Check("report FAILED: algorithms disagreed on path cost".into()));
    }
    Ok(())
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Source-target pairs to cross-check against the oracle
    #[arg(long, default_value_t = 20)]
    pairs: u32,
    /// Nodes sampled for the admissibility check
    #[arg(long, default_value_t = 50)]
    sample: u32,
    /// Largest look-ahead depth under test
    #[arg(long, default_value_t = 5)]
    k_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let graph = args.network.load()?;
    let mut failed = false;

    let violations = graph.metric_violations(METRIC_TOLERANCE_M);
    if violations.is_empty() {
        println!("metric-consistency: PASS ({} arcs)", graph.num_arcs());
    } else {
        failed = true;
        println!("metric-consistency: FAIL ({} violating arcs)", violations.len());
        for v in &violations {
            println!(
                "  arc {}->{}: cost {} < metric distance {}",
                graph.external_id(v.from),
                graph.external_id(v.to),
                v.cost,
                v.metric_distance
            );
        }
    }

    let core = largest_navigable_component(&graph).map_err(input)?;
    let requested = args.pairs.min(((core.num_nodes() * (core.num_nodes() - 1)) / 2) as u32);
    let pairs = kstep_core::bench::sample_pairs(&core, requested.max(1), args.seed)
        .map_err(input)?;

    let mut cost_mismatches = 0usize;
    for &(s, t) in &pairs {
        let (exact, _) = oracle_shortest(&core, s, t).map_err(input)?;
        let mut check = |cost: f64| {
            if (cost - exact).abs() > 1e-9 * exact.abs().max(1.0) {
                cost_mismatches += 1;
            }
        };
        check(dijkstra(&core, s, t).map_err(input)?.cost);
        check(astar_with(&core, s, t, &HeuristicSpec::Euclidean, SearchOptions::default())
            .map_err(input)?
            .cost);
        for k in 1..=args.k_max {
            check(
                astar_with(&core, s, t, &HeuristicSpec::Lookahead { k }, SearchOptions::default())
                    .map_err(input)?
                    .cost,
            );
        }
    }
    if cost_mismatches == 0 {
        println!(
            "oracle-equivalence: PASS ({} pairs, {} algorithms)",
            pairs.len(),
            2 + args.k_max
        );
    } else {
        failed = true;
        println!("oracle-equivalence: FAIL ({cost_mismatches} cost mismatches)");
    }

    let sample: Vec<NodeId> = {
        let all: Vec<NodeId> = core.node_ids().collect();
        all.into_iter().take(args.sample as usize).collect()
    };
    let mut admissibility_violations = 0usize;
    for &(_, t) in pairs.iter().take(3) {
        for k in 0..=args.k_max {
            let spec = if k == 0 {
                HeuristicSpec::Euclidean
            } else {
                HeuristicSpec::Lookahead { k }
            };
            let report = check_admissibility(&core, &spec, t, &sample);
            admissibility_violations += report.violations.len();
        }
    }
    if admissibility_violations == 0 {
        println!("admissibility: PASS ({} sampled nodes)", sample.len());
    } else {
        failed = true;
        println!("admissibility: FAIL ({admissibility_violations} overestimates)");
    }

    if failed {
        println!("validate: FAIL");
        Err(Failure::Check("validation failed".into()))
    } else {
        println!("validate: PASS");
        Ok(())
    }
}
