//! Heuristic correctness checks against exact oracle distances.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::graph::{NodeId, RoadGraph};
use crate::oracle::oracle_distances_to;
use crate::search::{heuristic_value, HeuristicSpec, VisitedSet};

/// Slack for floating-point noise when comparing heuristic values against
/// exact distances, in meters.
pub const ADMISSIBILITY_TOL_M: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct AdmissibilityViolation {
    pub node: NodeId,
    pub heuristic: f64,
    pub exact: f64,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub checked: usize,
    pub violations: Vec<AdmissibilityViolation>,
}

impl AdmissibilityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares h(n), evaluated with an empty visited set, against the exact
/// distance from n to `t` for every sampled node, reporting each node whose
/// estimate overshoots. An admissible heuristic produces no violations.
pub fn check_admissibility(
    g: &RoadGraph,
    h: &HeuristicSpec,
    t: NodeId,
    sample: &[NodeId],
) -> AdmissibilityReport {
    let exact = oracle_distances_to(g, t);
    let values = eval_nodes(g, h, t, sample);
    let violations = sample
        .iter()
        .zip(values)
        .filter(|&(&n, value)| value > exact[n.index()] + ADMISSIBILITY_TOL_M)
        .map(|(&n, value)| AdmissibilityViolation {
            node: n,
            heuristic: value,
            exact: exact[n.index()],
        })
        .collect();
    AdmissibilityReport { checked: sample.len(), violations }
}

#[derive(Debug, Clone, Copy)]
pub struct ConsistencyViolation {
    pub from: NodeId,
    pub to: NodeId,
    pub h_from: f64,
    pub arc_cost: f64,
    pub h_to: f64,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// Heuristic value at the target itself; must be 0 for consistency.
    pub target_h: f64,
    pub arcs_checked: usize,
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.target_h.abs() <= ADMISSIBILITY_TOL_M
    }
}

/// Evaluates h(n) <= c(n, p) + h(p) over every arc (with an empty visited
/// set) plus h(t) = 0, listing the violating arcs. The look-ahead estimator
/// is allowed to violate this even where it stays admissible.
pub fn check_consistency(g: &RoadGraph, h: &HeuristicSpec, t: NodeId) -> ConsistencyReport {
    let nodes: Vec<NodeId> = g.node_ids().collect();
    let values = eval_nodes(g, h, t, &nodes);
    let violations = g
        .arcs()
        .iter()
        .filter(|a| {
            values[a.from.index()] > a.cost + values[a.to.index()] + ADMISSIBILITY_TOL_M
        })
        .map(|a| ConsistencyViolation {
            from: a.from,
            to: a.to,
            h_from: values[a.from.index()],
            arc_cost: a.cost,
            h_to: values[a.to.index()],
        })
        .collect();
    ConsistencyReport {
        target_h: values[t.index()],
        arcs_checked: g.num_arcs(),
        violations,
    }
}

fn eval_nodes(g: &RoadGraph, h: &HeuristicSpec, t: NodeId, nodes: &[NodeId]) -> Vec<f64> {
    let empty = VisitedSet::new(g.num_nodes());
    #[cfg(feature = "parallel")]
    {
        nodes.par_iter().map(|&n| heuristic_value(g, h, &empty, n, t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        nodes.iter().map(|&n| heuristic_value(g, h, &empty, n, t)).collect()
    }
}
