//! Synthetic planar network generators for desk-scale verification: grid
//! lattices and random geometric graphs, seeded and fully deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{largest_navigable_component, GeoPoint, Metric, RoadGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Grid,
    RandomGeometric,
}

/// Generator parameters. `width`/`height` apply to grids, `n` and
/// `connect_radius` to random geometric graphs. Identical specs always
/// produce identical graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    #[serde(default)]
    pub width: Option<u32>,
    #[serde(default)]
    pub height: Option<u32>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub connect_radius: Option<f64>,
    /// Multiplier >= 1 on straight-line length, imitating roads running
    /// longer than the crow flies. Keeps metric estimates strict lower
    /// bounds when above 1.
    #[serde(default = "default_cost_factor")]
    pub cost_factor: f64,
    /// Positional noise amplitude per axis.
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub seed: u64,
    /// Fraction of edges emitted as a single directed arc.
    #[serde(default)]
    pub oneway_fraction: f64,
}

fn default_cost_factor() -> f64 {
    1.2
}

impl GenSpec {
    pub fn grid(width: u32, height: u32, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::Grid,
            width: Some(width),
            height: Some(height),
            n: None,
            connect_radius: None,
            cost_factor: default_cost_factor(),
            jitter: 0.0,
            seed,
            oneway_fraction: 0.0,
        }
    }

    pub fn random_geometric(n: u32, connect_radius: f64, seed: u64) -> GenSpec {
        GenSpec {
            kind: GenKind::RandomGeometric,
            width: None,
            height: None,
            n: Some(n),
            connect_radius: Some(connect_radius),
            cost_factor: default_cost_factor(),
            jitter: 0.0,
            seed,
            oneway_fraction: 0.0,
        }
    }

    pub fn with_cost_factor(mut self, cost_factor: f64) -> GenSpec {
        self.cost_factor = cost_factor;
        self
    }

    pub fn with_jitter(mut self, jitter: f64) -> GenSpec {
        self.jitter = jitter;
        self
    }

    pub fn with_oneway_fraction(mut self, fraction: f64) -> GenSpec {
        self.oneway_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if !self.cost_factor.is_finite() || self.cost_factor < 1.0 {
            return Err(GenError::InvalidSpec(format!(
                "cost_factor must be >= 1, got {}",
                self.cost_factor
            )));
        }
        if !self.jitter.is_finite() || self.jitter < 0.0 {
            return Err(GenError::InvalidSpec(format!(
                "jitter must be >= 0, got {}",
                self.jitter
            )));
        }
        if !(0.0..=1.0).contains(&self.oneway_fraction) {
            return Err(GenError::InvalidSpec(format!(
                "oneway_fraction must be in [0, 1], got {}",
                self.oneway_fraction
            )));
        }
        match self.kind {
            GenKind::Grid => {
                let (w, h) = (self.width.unwrap_or(0), self.height.unwrap_or(0));
                if w < 2 || h < 2 {
                    return Err(GenError::InvalidSpec(format!(
                        "grid needs width and height >= 2, got {w}x{h}"
                    )));
                }
            }
            GenKind::RandomGeometric => {
                let n = self.n.unwrap_or(0);
                if n < 2 {
                    return Err(GenError::InvalidSpec(format!(
                        "random geometric graph needs n >= 2, got {n}"
                    )));
                }
                match self.connect_radius {
                    Some(r) if r.is_finite() && r >= 0.0 => {}
                    other => {
                        return Err(GenError::InvalidSpec(format!(
                            "connect_radius must be a non-negative number, got {other:?}"
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("generated network collapsed to fewer than 2 mutually reachable nodes")]
    DegenerateOutput,
}

pub fn generate(spec: &GenSpec) -> Result<RoadGraph, GenError> {
    spec.validate()?;
    match spec.kind {
        GenKind::Grid => gen_grid(spec),
        GenKind::RandomGeometric => gen_random_geometric(spec),
    }
}

/// width x height lattice with unit spacing; every lattice edge becomes two
/// opposing arcs (or one, when sampled one-way) costed at straight-line
/// length times `cost_factor`, with positions jittered first.
pub fn gen_grid(spec: &GenSpec) -> Result<RoadGraph, GenError> {
    spec.validate()?;
    let (width, height) = (spec.width.unwrap() as usize, spec.height.unwrap() as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut points = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            points.push(jittered(x as f64, y as f64, spec.jitter, &mut rng));
        }
    }

    let mut arcs = Vec::new();
    for y in 0..height {
        for x in 0..width {
            let here = y * width + x;
            if x + 1 < width {
                push_edge(&points, here, here + 1, spec, &mut rng, &mut arcs);
            }
            if y + 1 < height {
                push_edge(&points, here, here + width, spec, &mut rng, &mut arcs);
            }
        }
    }

    let ext_ids = (0..points.len() as u64).collect();
    Ok(RoadGraph::build(points, ext_ids, Metric::Planar, arcs)
        .expect("generated lattice is structurally valid"))
}

/// n points uniform in the unit square, arcs between every pair within
/// `connect_radius`, reduced to the largest strongly connected component.
pub fn gen_random_geometric(spec: &GenSpec) -> Result<RoadGraph, GenError> {
    spec.validate()?;
    let n = spec.n.unwrap() as usize;
    let radius = spec.connect_radius.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.random_range(0.0..1.0);
        let y = rng.random_range(0.0..1.0);
        points.push(GeoPoint::new(y, x));
    }

    let mut arcs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if crate::graph::planar_m(points[i], points[j]) <= radius {
                push_edge(&points, i, j, spec, &mut rng, &mut arcs);
            }
        }
    }

    let full = RoadGraph::build(points, (0..n as u64).collect(), Metric::Planar, arcs)
        .expect("generated geometric graph is structurally valid");
    let core = largest_navigable_component(&full).map_err(|_| GenError::DegenerateOutput)?;
    if core.num_nodes() < 2 {
        return Err(GenError::DegenerateOutput);
    }
    Ok(core)
}

fn jittered(x: f64, y: f64, jitter: f64, rng: &mut ChaCha8Rng) -> GeoPoint {
    if jitter > 0.0 {
        let dx = rng.random_range(-jitter..=jitter);
        let dy = rng.random_range(-jitter..=jitter);
        GeoPoint::new(y + dy, x + dx)
    } else {
        GeoPoint::new(y, x)
    }
}

fn push_edge(
    points: &[GeoPoint],
    a: usize,
    b: usize,
    spec: &GenSpec,
    rng: &mut ChaCha8Rng,
    arcs: &mut Vec<(usize, usize, f64)>,
) {
    let cost = crate::graph::planar_m(points[a], points[b]) * spec.cost_factor;
    let oneway = spec.oneway_fraction > 0.0 && rng.random_bool(spec.oneway_fraction);
    if oneway {
        if rng.random_bool(0.5) {
            arcs.push((a, b, cost));
        } else {
            arcs.push((b, a, cost));
        }
    } else {
        arcs.push((a, b, cost));
        arcs.push((b, a, cost));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{export_network, NodeId};

    /// Brute-force strong-connectivity check: node 0 reaches every node and
    /// every node reaches node 0.
    fn strongly_connected(g: &RoadGraph) -> bool {
        let n = g.num_nodes();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for arc in g.arcs() {
                    let (from, to) = if forward {
                        (arc.from.index(), arc.to.index())
                    } else {
                        (arc.to.index(), arc.from.index())
                    };
                    if from == v && !seen[to] {
                        seen[to] = true;
                        stack.push(to);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    #[test]
    fn two_by_two_grid_counts() {
        let spec = GenSpec::grid(2, 2, 0).with_cost_factor(1.0);
        let g = gen_grid(&spec).unwrap();
        assert_eq!(g.num_nodes(), 4);
        assert_eq!(g.num_arcs(), 8);
        for arc in g.arcs() {
            assert_eq!(arc.cost, 1.0);
        }
    }

    #[test]
    fn identical_specs_export_identical_bytes() {
        let spec = GenSpec::grid(5, 4, 7).with_jitter(0.2).with_oneway_fraction(0.3);
        let dir = tempfile::tempdir().unwrap();
        let mut dumps = Vec::new();
        for run in 0..2 {
            let g = gen_grid(&spec).unwrap();
            let nodes = dir.path().join(format!("n{run}.csv"));
            let edges = dir.path().join(format!("e{run}.csv"));
            export_network(&g, &nodes, &edges).unwrap();
            dumps.push((std::fs::read(nodes).unwrap(), std::fs::read(edges).unwrap()));
        }
        assert_eq!(dumps[0], dumps[1]);
    }

    #[test]
    fn twenty_grid_is_strongly_connected() {
        let g = gen_grid(&GenSpec::grid(20, 20, 3).with_jitter(0.1)).unwrap();
        assert_eq!(g.num_nodes(), 400);
        assert!(strongly_connected(&g));
    }

    #[test]
    fn generated_costs_dominate_planar_distance() {
        let spec = GenSpec::random_geometric(80, 0.2, 11).with_jitter(0.0);
        let g = gen_random_geometric(&spec).unwrap();
        for arc in g.arcs() {
            let d = g.distance(arc.from, arc.to);
            assert!(arc.cost >= d - 1e-9, "cost {} below distance {d}", arc.cost);
        }
        // cost_factor 1 makes costs equal distances exactly.
        let exact = gen_random_geometric(&spec.clone().with_cost_factor(1.0)).unwrap();
        for arc in exact.arcs() {
            assert_eq!(arc.cost, exact.distance(arc.from, arc.to));
        }
    }

    #[test]
    fn two_points_with_covering_radius_connect() {
        let g = gen_random_geometric(&GenSpec::random_geometric(2, 2.0, 1)).unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.num_arcs(), 2);
    }

    #[test]
    fn radius_zero_is_degenerate() {
        assert!(matches!(
            gen_random_geometric(&GenSpec::random_geometric(10, 0.0, 1)),
            Err(GenError::DegenerateOutput)
        ));
    }

    #[test]
    fn five_hundred_node_geometric_core_is_navigable() {
        let g = gen_random_geometric(&GenSpec::random_geometric(500, 0.08, 42)).unwrap();
        assert!(g.num_nodes() >= 2);
        assert!(strongly_connected(&g));
        // External ids survive the component cut.
        assert!(g.node_ids().all(|n| g.external_id(n) < 500));
        let _ = g.resolve_external(g.external_id(NodeId::new(0))).unwrap();
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(gen_grid(&GenSpec::grid(1, 5, 0)), Err(GenError::InvalidSpec(_))));
        assert!(matches!(
            generate(&GenSpec::random_geometric(1, 0.5, 0)),
            Err(GenError::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&GenSpec::grid(3, 3, 0).with_cost_factor(0.5)),
            Err(GenError::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&GenSpec::grid(3, 3, 0).with_oneway_fraction(1.5)),
            Err(GenError::InvalidSpec(_))
        ));
    }
}
