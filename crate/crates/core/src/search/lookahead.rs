//! The k-step look-ahead estimator.
//!
//! Instead of scoring a node by direct metric distance, the estimator walks
//! every acyclic continuation of exactly k arcs that avoids visited nodes,
//! scores each by traversed cost plus metric distance from its endpoint to
//! the target, and returns the minimum. A continuation that arrives at the
//! target is cut there and scores as its traversed cost alone. With no
//! continuation at all the value is +inf: a dead end, not an error.

use crate::graph::{NodeId, RoadGraph};
use crate::search::VisitedSet;

/// Reusable per-search state: the on-path marker for the current look-ahead
/// walk and a lazily filled table of metric distances to the target.
#[derive(Debug)]
pub(crate) struct LookaheadScratch {
    on_path: Vec<bool>,
    dist_to: Vec<f64>,
    target: Option<NodeId>,
}

impl LookaheadScratch {
    pub(crate) fn new(num_nodes: usize) -> LookaheadScratch {
        LookaheadScratch {
            on_path: vec![false; num_nodes],
            dist_to: vec![f64::NAN; num_nodes],
            target: None,
        }
    }

    /// Metric distance from `n` to `t`, memoized per target.
    pub(crate) fn metric_to(&mut self, g: &RoadGraph, t: NodeId, n: NodeId) -> f64 {
        if self.target != Some(t) {
            self.dist_to.fill(f64::NAN);
            self.target = Some(t);
        }
        let cached = self.dist_to[n.index()];
        if cached.is_nan() {
            let d = g.distance(n, t);
            self.dist_to[n.index()] = d;
            d
        } else {
            cached
        }
    }
}

/// k-step look-ahead value of `n` given the search's visited set. Returns 0
/// at the target itself and +inf when every continuation is blocked.
pub fn lookahead_h(g: &RoadGraph, x: &VisitedSet, n: NodeId, t: NodeId, k: u32) -> f64 {
    let mut scratch = LookaheadScratch::new(g.num_nodes());
    let mut steps = 0;
    lookahead_cost(g, x, n, t, k, &mut scratch, &mut steps)
}

pub(crate) fn lookahead_cost(
    g: &RoadGraph,
    visited: &VisitedSet,
    n: NodeId,
    t: NodeId,
    k: u32,
    scratch: &mut LookaheadScratch,
    steps: &mut u64,
) -> f64 {
    assert!(k >= 1, "look-ahead depth must be at least 1");
    if n == t {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    scratch.on_path[n.index()] = true;
    descend(g, visited, t, n, k, 0.0, &mut best, scratch, steps);
    scratch.on_path[n.index()] = false;
    best
}

#[allow(clippy::too_many_arguments)]
fn descend(
    g: &RoadGraph,
    visited: &VisitedSet,
    t: NodeId,
    node: NodeId,
    remaining: u32,
    cost_so_far: f64,
    best: &mut f64,
    scratch: &mut LookaheadScratch,
    steps: &mut u64,
) {
    for arc in g.out_arcs(node) {
        *steps += 1;
        let child = arc.to;
        if visited.contains(child) || scratch.on_path[child.index()] {
            continue;
        }
        let cost = cost_so_far + arc.cost;
        if cost >= *best {
            continue; // completions only add non-negative terms
        }
        if child == t {
            *best = cost; // cut: the walk stops at the target
            continue;
        }
        if remaining == 1 {
            let value = cost + scratch.metric_to(g, t, child);
            if value < *best {
                *best = value;
            }
            continue;
        }
        scratch.on_path[child.index()] = true;
        descend(g, visited, t, child, remaining - 1, cost, best, scratch, steps);
        scratch.on_path[child.index()] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fixture_t1, oracle_lookahead, T1_A, T1_B, T1_C, T1_T};

    const R2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn one_step_from_a() {
        // min(c(a,b) + dist(b,t), c(a,c) + dist(c,t)) = min(1 + 1, 2*sqrt(2)).
        let g = fixture_t1();
        let x = VisitedSet::from_nodes(4, [T1_A]);
        assert_eq!(lookahead_h(&g, &x, T1_A, T1_T, 1), 2.0);
    }

    #[test]
    fn two_steps_from_a() {
        // Candidates: a-b-t cut at t (cost 2) and a-c-t (cost 2*sqrt(2)).
        let g = fixture_t1();
        let x = VisitedSet::from_nodes(4, [T1_A]);
        assert_eq!(lookahead_h(&g, &x, T1_A, T1_T, 2), 2.0);
    }

    #[test]
    fn at_the_target_the_value_is_zero() {
        let g = fixture_t1();
        let x = VisitedSet::new(4);
        for k in 1..=6 {
            assert_eq!(lookahead_h(&g, &x, T1_T, T1_T, k), 0.0);
        }
    }

    #[test]
    fn all_neighbors_visited_yields_infinity() {
        let g = fixture_t1();
        let x = VisitedSet::from_nodes(4, [T1_B, T1_C]);
        assert_eq!(lookahead_h(&g, &x, T1_A, T1_T, 1), f64::INFINITY);
    }

    #[test]
    fn deeper_than_any_simple_path_still_cuts_at_the_target() {
        let g = fixture_t1();
        let x = VisitedSet::new(4);
        assert_eq!(lookahead_h(&g, &x, T1_A, T1_T, 10), 2.0);
        assert_eq!(lookahead_h(&g, &x, T1_C, T1_T, 10), R2);
    }

    #[test]
    fn agrees_with_the_brute_force_enumerator_on_t1() {
        let g = fixture_t1();
        let nodes = [T1_A, T1_B, T1_C, T1_T];
        // Every (visited-subset, n, t, k) combination on the fixture.
        for mask in 0u32..16 {
            let x = VisitedSet::from_nodes(
                4,
                nodes.iter().copied().filter(|n| mask & (1 << n.index()) != 0),
            );
            for &n in &nodes {
                for &t in &nodes {
                    for k in 1..=5 {
                        let fast = lookahead_h(&g, &x, n, t, k);
                        let slow = oracle_lookahead(&g, &x, n, t, k);
                        assert_eq!(
                            fast, slow,
                            "mismatch at n={n} t={t} k={k} mask={mask:04b}"
                        );
                    }
                }
            }
        }
    }
}
