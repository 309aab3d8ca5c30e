//! Builders shared by the property and acceptance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kstep_core::graph::{largest_navigable_component, GeoPoint, Metric, RoadGraph};
use kstep_core::netgen::{gen_grid, gen_random_geometric, GenSpec};
use kstep_core::oracle::fixture_t1;

/// Arbitrary-cost planar digraph: uniform points, random arcs, costs
/// unrelated to geometry. Not necessarily connected or metric-consistent,
/// which is the point; oracle cross-checks must not depend on either.
pub fn random_digraph(seed: u64, max_nodes: usize) -> RoadGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes.max(2));
    let points: Vec<GeoPoint> = (0..n)
        .map(|_| GeoPoint::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect();
    // Spaced external ids exercise the dense remapping.
    let ext_ids: Vec<u64> = (0..n as u64).map(|i| i * 3 + 1).collect();
    let density = rng.random_range(0.05..0.3);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                arcs.push((i, j, rng.random_range(0.0..2.0)));
            }
        }
    }
    RoadGraph::build(points, ext_ids, Metric::Planar, arcs).unwrap()
}

/// The metric-consistent graph family the invariants quantify over: the
/// hand fixture, jittered grids (one with one-way streets), and random
/// geometric cores at road-like degrees, including one with costs exactly
/// equal to distances.
pub fn suite() -> Vec<(&'static str, RoadGraph)> {
    vec![
        ("t1", fixture_t1()),
        (
            "grid-20x20",
            gen_grid(&GenSpec::grid(20, 20, 42).with_jitter(0.1)).unwrap(),
        ),
        (
            "grid-8x8-oneway",
            largest_navigable_component(
                &gen_grid(
                    &GenSpec::grid(8, 8, 7).with_jitter(0.15).with_oneway_fraction(0.3),
                )
                .unwrap(),
            )
            .unwrap(),
        ),
        (
            "rgg-300",
            gen_random_geometric(&GenSpec::random_geometric(300, 0.073, 3)).unwrap(),
        ),
        (
            "rgg-150-tight",
            gen_random_geometric(
                &GenSpec::random_geometric(150, 0.103, 9).with_cost_factor(1.0),
            )
            .unwrap(),
        ),
    ]
}

/// Deterministic node sample of at most `count` nodes.
pub fn sample_nodes(
    g: &RoadGraph,
    count: usize,
    seed: u64,
) -> Vec<kstep_core::graph::NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<_> = g.node_ids().collect();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    ids.truncate(count);
    ids
}
