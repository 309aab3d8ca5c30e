//! Single-pair shortest-path search: Dijkstra, A*, and the heuristic family
//! (zero, straight-line metric, k-step look-ahead), with per-run statistics.

mod checks;
mod lookahead;

pub use checks::{
    check_admissibility, check_consistency, AdmissibilityReport, AdmissibilityViolation,
    ConsistencyReport, ConsistencyViolation, ADMISSIBILITY_TOL_M,
};
pub use lookahead::lookahead_h;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, Path, RoadGraph};
use lookahead::LookaheadScratch;

/// Which estimator A* runs with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicSpec {
    /// Always 0; reduces A* to Dijkstra.
    Zero,
    /// Metric distance to the target under the graph's metric selector.
    Euclidean,
    /// k-step look-ahead over unvisited successors, k >= 1.
    Lookahead { k: u32 },
}

/// Membership flags per node; a node is marked at most once per search in
/// the default (no re-expansion) mode.
#[derive(Debug, Clone)]
pub struct VisitedSet {
    bits: Vec<bool>,
    len: usize,
}

impl VisitedSet {
    pub fn new(num_nodes: usize) -> VisitedSet {
        VisitedSet { bits: vec![false; num_nodes], len: 0 }
    }

    pub fn from_nodes(num_nodes: usize, nodes: impl IntoIterator<Item = NodeId>) -> VisitedSet {
        let mut set = VisitedSet::new(num_nodes);
        for n in nodes {
            set.insert(n);
        }
        set
    }

    /// Marks `n`, returning whether it was newly inserted.
    pub fn insert(&mut self, n: NodeId) -> bool {
        let slot = &mut self.bits[n.index()];
        let new = !*slot;
        *slot = true;
        self.len += new as usize;
        new
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.bits[n.index()]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Heap entry. The binary heap is lazy: every improvement pushes a fresh
/// entry and stale ones are skipped at pop instead of decreased in place.
/// Keys may be +inf (a dead-ended look-ahead) but never NaN.
#[derive(Debug, Clone, Copy)]
struct FrontierEntry {
    /// Priority: d for Dijkstra, f = g + h for A*.
    key: f64,
    /// Cost from the source when this entry was pushed.
    g_at_push: f64,
    node: NodeId,
}

impl Ord for FrontierEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so BinaryHeap pops the smallest key; ties break toward
        // smaller g, then smaller node id, keeping runs reproducible.
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.g_at_push.total_cmp(&self.g_at_push))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for FrontierEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for FrontierEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FrontierEntry {}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Allow settled nodes to be re-relaxed and re-expanded when their cost
    /// improves. On by default: the look-ahead estimator depends on the
    /// visited set, so mid-search it can overestimate and settle a node
    /// through the wrong parent; re-expansion repairs that at the cost of a
    /// few extra settles. Turning this off gives the strict closed-set
    /// discipline (visited nodes are final), which can return slightly
    /// suboptimal paths under look-ahead heuristics.
    pub reopen: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { reopen: true }
    }
}

impl SearchOptions {
    /// Strict closed set: a settled node is never touched again.
    pub fn closed_set() -> Self {
        SearchOptions { reopen: false }
    }
}

/// Outcome of one search run.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Shortest path found, source to target; empty when source == target.
    pub path: Path,
    /// Total cost in meters; equals `path.total_cost`.
    pub cost: f64,
    /// Settle events, including the target. Stale queue pops don't count.
    pub nodes_expanded: u64,
    /// Calls to the heuristic estimator.
    pub heuristic_evals: u64,
    /// Arcs examined inside look-ahead enumerations, summed over all evals.
    pub heuristic_steps: u64,
    /// Wall time of the search itself, heuristic work included; graph
    /// loading and preprocessing happen elsewhere.
    pub wall_time: Duration,
    /// Nodes in settle order.
    pub settled: Vec<NodeId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("target is unreachable from the source")]
    NoPath,
    #[error("predecessor map has no chain from the target back to the source")]
    BrokenChain,
    #[error("look-ahead depth k must be at least 1")]
    InvalidLookaheadDepth,
}

/// Predecessor links written during a search and unwound afterwards.
#[derive(Debug, Clone)]
pub struct PredecessorMap {
    prev: Vec<Option<NodeId>>,
}

impl PredecessorMap {
    pub fn new(num_nodes: usize) -> PredecessorMap {
        PredecessorMap { prev: vec![None; num_nodes] }
    }

    pub fn from_pairs(
        num_nodes: usize,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> PredecessorMap {
        let mut map = PredecessorMap::new(num_nodes);
        for (node, parent) in pairs {
            map.set(node, parent);
        }
        map
    }

    pub fn set(&mut self, node: NodeId, parent: NodeId) {
        self.prev[node.index()] = Some(parent);
    }

    pub fn get(&self, node: NodeId) -> Option<NodeId> {
        self.prev[node.index()]
    }
}

/// Unwinds the predecessor chain target-to-source into a forward path,
/// summing arc costs along the way.
pub fn reconstruct_path(
    g: &RoadGraph,
    previous: &PredecessorMap,
    s: NodeId,
    t: NodeId,
) -> Result<Path, SearchError> {
    if s == t {
        return Ok(Path::empty());
    }
    let mut edges = Vec::new();
    let mut cur = t;
    // A chain longer than the node count means a cycle, not a path.
    for _ in 0..g.num_nodes() {
        let parent = previous.get(cur).ok_or(SearchError::BrokenChain)?;
        edges.push((parent, cur));
        if parent == s {
            edges.reverse();
            let mut total = 0.0;
            for &(from, to) in &edges {
                total += g.arc(from, to).ok_or(SearchError::BrokenChain)?.cost;
            }
            return Ok(Path { edges, total_cost: total });
        }
        cur = parent;
    }
    Err(SearchError::BrokenChain)
}

/// Metric distance from `n` to the target; the baseline admissible estimate.
pub fn euclidean_h(g: &RoadGraph, n: NodeId, t: NodeId) -> f64 {
    g.distance(n, t)
}

/// Evaluates `spec` at `n` the way a search would, given the visited set.
pub fn heuristic_value(
    g: &RoadGraph,
    spec: &HeuristicSpec,
    visited: &VisitedSet,
    n: NodeId,
    t: NodeId,
) -> f64 {
    match *spec {
        HeuristicSpec::Zero => 0.0,
        HeuristicSpec::Euclidean => euclidean_h(g, n, t),
        HeuristicSpec::Lookahead { k } => lookahead_h(g, visited, n, t, k),
    }
}

/// Dijkstra's algorithm on non-negative arc costs, terminating as soon as
/// the target settles.
pub fn dijkstra(g: &RoadGraph, s: NodeId, t: NodeId) -> Result<SearchResult, SearchError> {
    let started = Instant::now();
    let n = g.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut previous = PredecessorMap::new(n);
    let mut visited = VisitedSet::new(n);
    let mut frontier = BinaryHeap::new();
    let mut settled = Vec::new();

    dist[s.index()] = 0.0;
    frontier.push(FrontierEntry { key: 0.0, g_at_push: 0.0, node: s });

    while let Some(entry) = frontier.pop() {
        let i = entry.node;
        if visited.contains(i) || entry.g_at_push > dist[i.index()] {
            continue; // stale: a cheaper push already handled this node
        }
        visited.insert(i);
        settled.push(i);
        if i == t {
            break;
        }
        for arc in g.out_arcs(i) {
            if visited.contains(arc.to) {
                continue;
            }
            let d_tmp = dist[i.index()] + arc.cost;
            if d_tmp < dist[arc.to.index()] {
                dist[arc.to.index()] = d_tmp;
                previous.set(arc.to, i);
                frontier.push(FrontierEntry { key: d_tmp, g_at_push: d_tmp, node: arc.to });
            }
        }
    }

    if !visited.contains(t) {
        return Err(SearchError::NoPath);
    }
    let path = reconstruct_path(g, &previous, s, t)?;
    Ok(SearchResult {
        cost: dist[t.index()],
        path,
        nodes_expanded: settled.len() as u64,
        heuristic_evals: 0,
        heuristic_steps: 0,
        wall_time: started.elapsed(),
        settled,
    })
}

/// A* with the given heuristic. Equivalent to [`astar_with`] under default
/// options (no re-expansion).
pub fn astar(
    g: &RoadGraph,
    s: NodeId,
    t: NodeId,
    h: &HeuristicSpec,
) -> Result<SearchResult, SearchError> {
    astar_with(g, s, t, h, SearchOptions::default())
}

/// A* keyed by f = g + h. The heuristic is evaluated at relaxation time
/// against the visited set of that moment, so look-ahead values reflect the
/// current search state; nothing is cached across searches.
pub fn astar_with(
    g: &RoadGraph,
    s: NodeId,
    t: NodeId,
    h: &HeuristicSpec,
    options: SearchOptions,
) -> Result<SearchResult, SearchError> {
    if let HeuristicSpec::Lookahead { k: 0 } = h {
        return Err(SearchError::InvalidLookaheadDepth);
    }
    let started = Instant::now();
    let n = g.num_nodes();
    let mut gscore = vec![f64::INFINITY; n];
    let mut previous = PredecessorMap::new(n);
    let mut visited = VisitedSet::new(n);
    let mut frontier = BinaryHeap::new();
    let mut settled = Vec::new();
    let mut scratch = LookaheadScratch::new(n);
    let mut evals: u64 = 0;
    let mut steps: u64 = 0;

    let eval = |node: NodeId,
                    visited: &VisitedSet,
                    scratch: &mut LookaheadScratch,
                    evals: &mut u64,
                    steps: &mut u64| match *h {
        HeuristicSpec::Zero => {
            *evals += 1;
            0.0
        }
        HeuristicSpec::Euclidean => {
            *evals += 1;
            scratch.metric_to(g, t, node)
        }
        HeuristicSpec::Lookahead { k } => {
            *evals += 1;
            lookahead::lookahead_cost(g, visited, node, t, k, scratch, steps)
        }
    };

    gscore[s.index()] = 0.0;
    let f_s = eval(s, &visited, &mut scratch, &mut evals, &mut steps);
    frontier.push(FrontierEntry { key: f_s, g_at_push: 0.0, node: s });

    while let Some(entry) = frontier.pop() {
        let i = entry.node;
        if entry.g_at_push > gscore[i.index()] {
            continue; // stale
        }
        if !options.reopen && visited.contains(i) {
            continue;
        }
        visited.insert(i);
        settled.push(i);
        if i == t {
            break;
        }
        for arc in g.out_arcs(i) {
            if !options.reopen && visited.contains(arc.to) {
                continue;
            }
            let g_tmp = gscore[i.index()] + arc.cost;
            if g_tmp < gscore[arc.to.index()] {
                gscore[arc.to.index()] = g_tmp;
                previous.set(arc.to, i);
                let h_val = eval(arc.to, &visited, &mut scratch, &mut evals, &mut steps);
                frontier.push(FrontierEntry {
                    key: g_tmp + h_val,
                    g_at_push: g_tmp,
                    node: arc.to,
                });
            }
        }
    }

    if !visited.contains(t) {
        return Err(SearchError::NoPath);
    }
    let path = reconstruct_path(g, &previous, s, t)?;
    Ok(SearchResult {
        cost: gscore[t.index()],
        path,
        nodes_expanded: settled.len() as u64,
        heuristic_evals: evals,
        heuristic_steps: steps,
        wall_time: started.elapsed(),
        settled,
    })
}
