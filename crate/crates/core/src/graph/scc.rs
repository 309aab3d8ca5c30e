//! Strongly-connected-component preprocessing.
//!
//! Sampled source-target pairs must always be solvable, so preprocessing
//! keeps the largest strongly connected component rather than a weakly
//! connected one. Iterative Kosaraju: road networks are large enough that
//! recursive DFS would overflow the stack.

use thiserror::Error;

use super::{NodeId, RoadGraph};

#[derive(Debug, Error)]
pub enum ComponentError {
    #[error("graph has no nodes")]
    EmptyGraph,
}

/// Returns the subgraph induced by the largest strongly connected component,
/// with dense internal ids reassigned in the original order. Ties between
/// equal-sized components go to the one containing the smallest external id.
/// A graph that is already strongly connected comes back unchanged.
pub fn largest_navigable_component(g: &RoadGraph) -> Result<RoadGraph, ComponentError> {
    let n = g.num_nodes();
    if n == 0 {
        return Err(ComponentError::EmptyGraph);
    }

    let component = scc_labels(g);
    let num_components = component.iter().copied().max().unwrap() + 1;

    let mut sizes = vec![0usize; num_components];
    let mut min_ext = vec![u64::MAX; num_components];
    for (i, &c) in component.iter().enumerate() {
        sizes[c] += 1;
        min_ext[c] = min_ext[c].min(g.external_id(NodeId::new(i)));
    }
    let best = (0..num_components)
        .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(min_ext[b].cmp(&min_ext[a])))
        .unwrap();
    if sizes[best] == n {
        return Ok(g.clone());
    }

    let mut remap = vec![usize::MAX; n];
    let mut points = Vec::with_capacity(sizes[best]);
    let mut ext_ids = Vec::with_capacity(sizes[best]);
    for i in 0..n {
        if component[i] == best {
            remap[i] = points.len();
            points.push(g.point(NodeId::new(i)));
            ext_ids.push(g.external_id(NodeId::new(i)));
        }
    }
    let arcs = g
        .arcs()
        .iter()
        .filter(|a| component[a.from.index()] == best && component[a.to.index()] == best)
        .map(|a| (remap[a.from.index()], remap[a.to.index()], a.cost))
        .collect();

    Ok(RoadGraph::build(points, ext_ids, g.metric(), arcs)
        .expect("subgraph of a valid graph is valid"))
}

/// Kosaraju component labels, 0-based, in no particular order.
fn scc_labels(g: &RoadGraph) -> Vec<usize> {
    let n = g.num_nodes();

    // Pass 1: iterative DFS post-order on the forward graph.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (node, next child index)
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        stack.push((root, 0));
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let arcs = g.out_arcs(NodeId::new(v));
            if *next < arcs.len() {
                let child = arcs[*next].to.index();
                *next += 1;
                if !seen[child] {
                    seen[child] = true;
                    stack.push((child, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }

    // Reverse adjacency as a flat offsets layout.
    let mut rev_offsets = vec![0u32; n + 1];
    for a in g.arcs() {
        rev_offsets[a.to.index() + 1] += 1;
    }
    for i in 0..n {
        rev_offsets[i + 1] += rev_offsets[i];
    }
    let mut rev_targets = vec![0u32; g.num_arcs()];
    let mut cursor = rev_offsets.clone();
    for a in g.arcs() {
        let slot = cursor[a.to.index()];
        rev_targets[slot as usize] = a.from.index() as u32;
        cursor[a.to.index()] += 1;
    }

    // Pass 2: DFS on the reverse graph in reverse post-order.
    let mut component = vec![usize::MAX; n];
    let mut current = 0;
    let mut dfs = Vec::new();
    for &root in order.iter().rev() {
        if component[root] != usize::MAX {
            continue;
        }
        component[root] = current;
        dfs.push(root);
        while let Some(v) = dfs.pop() {
            let lo = rev_offsets[v] as usize;
            let hi = rev_offsets[v + 1] as usize;
            for &u in &rev_targets[lo..hi] {
                let u = u as usize;
                if component[u] == usize::MAX {
                    component[u] = current;
                    dfs.push(u);
                }
            }
        }
        current += 1;
    }
    component
}
