use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::label::DisjointSet;
use super::NodalDecomposition;

/// Domains as vertices, one edge per pair of domains on opposite sides of a
/// traced nodal line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingGraph {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub degrees: Vec<usize>,
    /// Vertex is interior and so are all its neighbours.
    pub fully_interior: Vec<bool>,
    /// Independent cycles among interior vertices (edges - vertices + components).
    pub interior_cycle_rank: usize,
}

impl NestingGraph {
    pub fn is_interior_acyclic(&self) -> bool {
        self.interior_cycle_rank == 0
    }

    pub fn has_interior_vertices(&self) -> bool {
        self.fully_interior.iter().any(|&f| f)
    }
}

pub fn nesting_graph(dec: &NodalDecomposition) -> NestingGraph {
    let n = dec.domains.len();
    let mut edge_set = BTreeSet::new();
    for c in &dec.contours {
        for &p in &c.plus {
            for &m in &c.minus {
                edge_set.insert((p.min(m), p.max(m)));
            }
        }
    }
    let edges: Vec<(u32, u32)> = edge_set.into_iter().collect();
    let mut degrees = vec![0usize; n];
    for &(a, b) in &edges {
        degrees[a as usize] += 1;
        degrees[b as usize] += 1;
    }
    let interior: Vec<bool> = dec.domains.iter().map(|d| d.is_interior()).collect();
    let mut fully_interior = interior.clone();
    for &(a, b) in &edges {
        if !interior[b as usize] {
            fully_interior[a as usize] = false;
        }
        if !interior[a as usize] {
            fully_interior[b as usize] = false;
        }
    }
    let mut sets = DisjointSet::new(n);
    let mut cycle_rank = 0;
    for &(a, b) in &edges {
        if interior[a as usize] && interior[b as usize] && !sets.union(a, b) {
            cycle_rank += 1;
        }
    }
    NestingGraph { vertices: (0..n as u32).collect(), edges, degrees, fully_interior, interior_cycle_rank: cycle_rank }
}
