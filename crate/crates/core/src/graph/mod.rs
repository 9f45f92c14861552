//! Simple undirected graphs and their combinatorial rigidity tests.
//!
//! Vertices are `0..n` internally. The JSON form uses 1-based labels,
//! `{"n": 4, "edges": [[1, 2], [1, 3]]}`.

mod connectivity;
mod pebble;

pub use connectivity::{is_k_connected, local_vertex_connectivity};
pub use pebble::{combinatorial_isostatic, is_sparse, is_tight, PebbleGame};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RigidityError};

/// An edge `(u, v)` with `u < v`, 0-based.
pub type Edge = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = RigidityError;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        Graph::from_one_based(repr.n, repr.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph from 0-based endpoint pairs. Pairs are normalized to
    /// `u < v`; edge order is kept.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(RigidityError::InvalidGraph(
                "vertex count must be positive".into(),
            ));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(RigidityError::InvalidGraph(format!(
                    "self-loop at vertex {}",
                    a + 1
                )));
            }
            if a >= n || b >= n {
                return Err(RigidityError::InvalidGraph(format!(
                    "edge ({}, {}) has an endpoint outside 1..={}",
                    a + 1,
                    b + 1,
                    n
                )));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(RigidityError::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0 + 1,
                    e.1 + 1
                )));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    /// Builds a graph from 1-based labels, as used in all file formats.
    pub fn from_one_based(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut zero_based = Vec::new();
        for (a, b) in edges {
            if a == 0 || b == 0 {
                return Err(RigidityError::InvalidGraph(format!(
                    "edge ({a}, {b}) uses label 0; labels are 1-based"
                )));
            }
            zero_based.push((a - 1, b - 1));
        }
        Graph::new(n, zero_based)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * (self.n - 1) / 2
    }

    /// Position of edge `uv` in the edge list, endpoints in either order.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let e = (u.min(v), u.max(v));
        self.edges.iter().position(|&f| f == e)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// The graph with the edge at `index` removed.
    pub fn without_edge(&self, index: usize) -> Graph {
        let mut edges = self.edges.clone();
        edges.remove(index);
        Graph { n: self.n, edges }
    }

    /// The graph with one more edge appended.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Graph::new(self.n, edges)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
