//! Shortest-path toolkit for Euclidean road networks.
//!
//! The crate loads or generates road networks, runs Dijkstra and A* with a
//! family of admissible heuristics (including a configurable k-step
//! look-ahead), verifies results against brute-force oracles, and drives a
//! benchmark harness that aggregates runtime and nodes-expanded statistics
//! per algorithm.
//!
//! With the default `parallel` feature the benchmark harness and the
//! heuristic checks fan out over source-target pairs and sampled nodes using
//! rayon; without it everything runs sequentially on one thread. Results are
//! identical either way.

pub mod bench;
pub mod graph;
pub mod netgen;
pub mod oracle;
pub mod search;
