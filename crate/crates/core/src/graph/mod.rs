//! Road-network graph types: immutable adjacency over directed arcs with
//! per-node coordinates, plus path utilities and the distance metric.

mod io;
mod metric;
mod scc;

pub use io::{export_network, load_network, LoadError, LoadOptions, METRIC_TOLERANCE_M};
pub use metric::{haversine_m, planar_m, EARTH_RADIUS_M};
pub use scc::{largest_navigable_component, ComponentError};

use std::collections::HashMap;

use thiserror::Error;

/// Dense internal node index, contiguous `0..num_nodes` after construction.
/// The original external id is kept in a side table on [`RoadGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> NodeId {
        NodeId(index as u32)
    }

    pub const fn from_u32(index: u32) -> NodeId {
        NodeId(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Node position. For geographic networks these are decimal degrees; for
/// planar networks the same fields carry y (`lat`) and x (`lon`) in
/// arbitrary planar units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint { lat, lon }
    }
}

/// Which distance function the graph's coordinates live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Haversine great-circle distance in meters; coordinates are degrees.
    GreatCircle,
    /// Straight-line Euclidean distance; coordinates are planar units.
    Planar,
}

impl Metric {
    pub fn distance(self, a: GeoPoint, b: GeoPoint) -> f64 {
        match self {
            Metric::GreatCircle => haversine_m(a, b),
            Metric::Planar => planar_m(a, b),
        }
    }
}

/// A directed arc with a non-negative traversal cost. Undirected input edges
/// are stored as two opposing arcs of equal cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("arc references node index {0} but the graph has {1} nodes")]
    InvalidEndpoint(usize, usize),
    #[error("arc {from}->{to} has negative or non-finite cost {cost}")]
    BadCost { from: usize, to: usize, cost: f64 },
    #[error("node {index} has non-finite coordinates ({lat}, {lon})")]
    NonFiniteCoordinate { index: usize, lat: f64, lon: f64 },
    #[error("node {index} has out-of-range geographic coordinates ({lat}, {lon})")]
    CoordinateOutOfRange { index: usize, lat: f64, lon: f64 },
    #[error("external id {0} appears more than once")]
    DuplicateExternalId(u64),
    #[error("{0} nodes but {1} external ids")]
    ExternalIdCountMismatch(usize, usize),
}

/// Immutable road network: coordinates per node and adjacency lists of
/// outgoing arcs in a compact offsets-plus-flat-array layout.
///
/// Construction drops self-loops and keeps only the cheapest of any set of
/// parallel arcs; neither can lie on a shortest path with non-negative costs.
#[derive(Debug, Clone)]
pub struct RoadGraph {
    points: Vec<GeoPoint>,
    ext_ids: Vec<u64>,
    ext_index: HashMap<u64, NodeId>,
    offsets: Vec<u32>,
    arcs: Vec<Arc>,
    metric: Metric,
}

impl RoadGraph {
    /// Builds a graph from node positions, their external ids, and arcs given
    /// as `(from, to, cost)` internal-index triples.
    pub fn build(
        points: Vec<GeoPoint>,
        ext_ids: Vec<u64>,
        metric: Metric,
        arcs: Vec<(usize, usize, f64)>,
    ) -> Result<RoadGraph, BuildError> {
        if points.len() != ext_ids.len() {
            return Err(BuildError::ExternalIdCountMismatch(points.len(), ext_ids.len()));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.lat.is_finite() || !p.lon.is_finite() {
                return Err(BuildError::NonFiniteCoordinate { index: i, lat: p.lat, lon: p.lon });
            }
            if metric == Metric::GreatCircle
                && (p.lat.abs() > 90.0 || p.lon.abs() > 180.0)
            {
                return Err(BuildError::CoordinateOutOfRange { index: i, lat: p.lat, lon: p.lon });
            }
        }
        let mut ext_index = HashMap::with_capacity(ext_ids.len());
        for (i, &ext) in ext_ids.iter().enumerate() {
            if ext_index.insert(ext, NodeId::new(i)).is_some() {
                return Err(BuildError::DuplicateExternalId(ext));
            }
        }

        let n = points.len();
        let mut cleaned: Vec<(usize, usize, f64)> = Vec::with_capacity(arcs.len());
        for (from, to, cost) in arcs {
            if from >= n {
                return Err(BuildError::InvalidEndpoint(from, n));
            }
            if to >= n {
                return Err(BuildError::InvalidEndpoint(to, n));
            }
            if !cost.is_finite() || cost < 0.0 {
                return Err(BuildError::BadCost { from, to, cost });
            }
            if from == to {
                continue; // self-loop
            }
            cleaned.push((from, to, cost));
        }
        // Group by source, order by (target, cost); the first arc of a
        // parallel run is the cheapest and the rest are dropped.
        cleaned.sort_by(|a, b| {
            (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2))
        });
        cleaned.dedup_by_key(|&mut (from, to, _)| (from, to));

        let mut offsets = vec![0u32; n + 1];
        for &(from, _, _) in &cleaned {
            offsets[from + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let arcs = cleaned
            .into_iter()
            .map(|(from, to, cost)| Arc {
                from: NodeId::new(from),
                to: NodeId::new(to),
                cost,
            })
            .collect();

        Ok(RoadGraph { points, ext_ids, ext_index, offsets, arcs, metric })
    }

    pub fn num_nodes(&self) -> usize {
        self.points.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, n: NodeId) -> GeoPoint {
        self.points[n.index()]
    }

    pub fn external_id(&self, n: NodeId) -> u64 {
        self.ext_ids[n.index()]
    }

    /// Maps an external (file-level) id back to its dense internal id.
    pub fn resolve_external(&self, ext: u64) -> Option<NodeId> {
        self.ext_index.get(&ext).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.num_nodes()).map(NodeId::new)
    }

    pub fn out_arcs(&self, n: NodeId) -> &[Arc] {
        let lo = self.offsets[n.index()] as usize;
        let hi = self.offsets[n.index() + 1] as usize;
        &self.arcs[lo..hi]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Looks up the arc `from -> to`, if present.
    pub fn arc(&self, from: NodeId, to: NodeId) -> Option<&Arc> {
        self.out_arcs(from).iter().find(|a| a.to == to)
    }

    /// Metric distance between two nodes under the graph's metric selector.
    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.metric.distance(self.point(a), self.point(b))
    }

    /// Arcs whose cost undercuts the metric distance between their endpoints
    /// (beyond `tol_m`); such arcs break metric-based lower bounds.
    pub fn metric_violations(&self, tol_m: f64) -> Vec<MetricViolation> {
        self.arcs
            .iter()
            .filter_map(|a| {
                let dist = self.distance(a.from, a.to);
                (a.cost + tol_m < dist).then_some(MetricViolation {
                    from: a.from,
                    to: a.to,
                    cost: a.cost,
                    metric_distance: dist,
                })
            })
            .collect()
    }
}

/// An arc cheaper than the metric distance between its endpoints.
#[derive(Debug, Clone, Copy)]
pub struct MetricViolation {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
    pub metric_distance: f64,
}

#[derive(Debug, Error)]
pub enum PathError {
    #[error("path breaks the chain at position {0}: pair ends at node {1} but the next pair starts at node {2}")]
    BrokenChain(usize, NodeId, NodeId),
    #[error("path references missing arc {0}->{1}")]
    MissingArc(NodeId, NodeId),
}

/// An ordered sequence of `(from, to)` arc endpoints with its total cost.
/// The empty path (for a source equal to its target) has cost 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub edges: Vec<(NodeId, NodeId)>,
    pub total_cost: f64,
}

impl Path {
    pub fn empty() -> Path {
        Path { edges: Vec::new(), total_cost: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when consecutive pairs chain: the second element of pair `j`
    /// equals the first element of pair `j + 1`.
    pub fn is_chained(&self) -> bool {
        self.edges.windows(2).all(|w| w[0].1 == w[1].0)
    }

    /// True when no node is visited twice along the path.
    pub fn is_acyclic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for node in self.nodes() {
            if !seen.insert(node) {
                return false;
            }
        }
        true
    }

    /// Nodes along the path in order, including both endpoints.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.edges
            .first()
            .map(|e| e.0)
            .into_iter()
            .chain(self.edges.iter().map(|e| e.1))
    }

    pub fn first_node(&self) -> Option<NodeId> {
        self.edges.first().map(|e| e.0)
    }

    pub fn last_node(&self) -> Option<NodeId> {
        self.edges.last().map(|e| e.1)
    }
}

/// Sums the arc costs along `p`, verifying that `p` is a valid path in `g`.
pub fn path_cost(g: &RoadGraph, p: &Path) -> Result<f64, PathError> {
    for (i, w) in p.edges.windows(2).enumerate() {
        if w[0].1 != w[1].0 {
            return Err(PathError::BrokenChain(i, w[0].1, w[1].0));
        }
    }
    let mut total = 0.0;
    for &(from, to) in &p.edges {
        let arc = g.arc(from, to).ok_or(PathError::MissingArc(from, to))?;
        total += arc.cost;
    }
    Ok(total)
}
