//! Independent brute-force ground truth.
//!
//! Everything here exists to check the search module and deliberately shares
//! none of its machinery: shortest paths come from label-correcting
//! relaxation sweeps with no priority queue and no heuristic, and the
//! look-ahead enumerator materializes the full path set with no pruning or
//! early exit. Performance is a non-goal.

use thiserror::Error;

use crate::graph::{GeoPoint, Metric, NodeId, Path, RoadGraph};
use crate::search::VisitedSet;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("no path from source to target")]
    NoPath,
}

/// Exact minimum cost and one optimal path, by Bellman-Ford-style relaxation
/// until fixpoint. Intended for graphs of at most a few thousand nodes.
pub fn oracle_shortest(
    g: &RoadGraph,
    s: NodeId,
    t: NodeId,
) -> Result<(f64, Path), OracleError> {
    let n = g.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<NodeId>> = vec![None; n];
    dist[s.index()] = 0.0;

    for _ in 0..n {
        let mut changed = false;
        for arc in g.arcs() {
            let du = dist[arc.from.index()];
            if du.is_finite() && du + arc.cost < dist[arc.to.index()] {
                dist[arc.to.index()] = du + arc.cost;
                prev[arc.to.index()] = Some(arc.from);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if !dist[t.index()].is_finite() {
        return Err(OracleError::NoPath);
    }
    let mut edges = Vec::new();
    let mut cur = t;
    while cur != s {
        let p = prev[cur.index()].expect("finite distance implies a predecessor chain");
        edges.push((p, cur));
        cur = p;
    }
    edges.reverse();
    Ok((dist[t.index()], Path { edges, total_cost: dist[t.index()] }))
}

/// Exact distance from every node to `t` (infinity where `t` is
/// unreachable), by relaxation sweeps over the reversed arcs.
pub fn oracle_distances_to(g: &RoadGraph, t: NodeId) -> Vec<f64> {
    let n = g.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    dist[t.index()] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for arc in g.arcs() {
            let dv = dist[arc.to.index()];
            if dv.is_finite() && arc.cost + dv < dist[arc.from.index()] {
                dist[arc.from.index()] = arc.cost + dv;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Literal k-step look-ahead value: materializes every acyclic look-ahead
/// path from `n`, scores each one, and takes the minimum. A path is complete
/// once it spans `k` arcs or arrives at `t`, whichever comes first; paths may
/// not enter visited nodes or revisit their own nodes. Returns infinity when
/// no look-ahead path exists.
pub fn oracle_lookahead(
    g: &RoadGraph,
    visited: &VisitedSet,
    n: NodeId,
    t: NodeId,
    k: u32,
) -> f64 {
    assert!(k >= 1, "look-ahead depth must be at least 1");
    if n == t {
        return 0.0;
    }

    let mut paths: Vec<Vec<NodeId>> = Vec::new();
    enumerate(g, visited, t, k, &mut vec![n], &mut paths);

    let mut best = f64::INFINITY;
    for path in &paths {
        let mut cost = 0.0;
        for pair in path.windows(2) {
            cost += g.arc(pair[0], pair[1]).expect("enumerated along arcs").cost;
        }
        let last = *path.last().unwrap();
        let value = cost + g.distance(last, t);
        if value < best {
            best = value;
        }
    }
    best
}

fn enumerate(
    g: &RoadGraph,
    visited: &VisitedSet,
    t: NodeId,
    k: u32,
    prefix: &mut Vec<NodeId>,
    out: &mut Vec<Vec<NodeId>>,
) {
    let last = *prefix.last().unwrap();
    if last == t || prefix.len() as u32 > k {
        out.push(prefix.clone());
        return;
    }
    for arc in g.out_arcs(last) {
        if visited.contains(arc.to) || prefix.contains(&arc.to) {
            continue;
        }
        prefix.push(arc.to);
        enumerate(g, visited, t, k, prefix, out);
        prefix.pop();
    }
}

/// Tiny hand-checkable planar fixture.
///
/// Nodes (as x, y): a = (0, 0), b = (1, 0), c = (1, 1), t = (2, 0), with
/// internal ids 0..=3 in that order. Bidirectional arcs a-b and b-t of cost
/// 1, a-c and c-t of cost sqrt(2); every cost equals the planar distance of
/// its endpoints, and the unique shortest a-to-t path is a-b-t with cost 2.
pub fn fixture_t1() -> RoadGraph {
    let r2 = std::f64::consts::SQRT_2;
    let points = vec![
        GeoPoint::new(0.0, 0.0), // a
        GeoPoint::new(0.0, 1.0), // b
        GeoPoint::new(1.0, 1.0), // c
        GeoPoint::new(0.0, 2.0), // t
    ];
    let arcs = vec![
        (0, 1, 1.0),
        (1, 0, 1.0),
        (1, 3, 1.0),
        (3, 1, 1.0),
        (0, 2, r2),
        (2, 0, r2),
        (2, 3, r2),
        (3, 2, r2),
    ];
    RoadGraph::build(points, vec![0, 1, 2, 3], Metric::Planar, arcs).unwrap()
}

/// Internal ids of (a, b, c, t) in [`fixture_t1`].
pub const T1_A: NodeId = NodeId::from_u32(0);
pub const T1_B: NodeId = NodeId::from_u32(1);
pub const T1_C: NodeId = NodeId::from_u32(2);
pub const T1_T: NodeId = NodeId::from_u32(3);
