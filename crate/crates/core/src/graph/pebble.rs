//! The (2, ℓ)-pebble game for 0 ≤ ℓ ≤ 3.
//!
//! Every vertex starts with two pebbles. An edge `uv` is accepted when
//! ℓ + 1 pebbles can be gathered on `u` and `v`; one of them then covers the
//! edge, which is oriented away from the vertex that paid for it. A graph is
//! (2, ℓ)-sparse iff every edge is accepted.

use super::{Edge, Graph};
use crate::error::{Result, RigidityError};
use crate::surface::SurfaceKind;

const PEBBLES_PER_VERTEX: usize = 2;

#[derive(Debug, Clone)]
pub struct PebbleGame {
    ell: usize,
    free: Vec<usize>,
    // out[v]: heads of edges covered by a pebble of v
    out: Vec<Vec<usize>>,
    accepted: Vec<Edge>,
}

impl PebbleGame {
    pub fn new(n: usize, ell: usize) -> Self {
        assert!(ell < 2 * PEBBLES_PER_VERTEX, "pebble game needs ell < 4");
        PebbleGame {
            ell,
            free: vec![PEBBLES_PER_VERTEX; n],
            out: vec![Vec::new(); n],
            accepted: Vec::new(),
        }
    }

    pub fn accepted(&self) -> &[Edge] {
        &self.accepted
    }

    /// Tries to insert `uv`; returns false if the edge is dependent.
    pub fn try_add(&mut self, u: usize, v: usize) -> bool {
        while self.free[u] + self.free[v] < self.ell + 1 {
            if !(self.gather(u, v) || self.gather(v, u)) {
                return false;
            }
        }
        if self.free[u] > 0 {
            self.free[u] -= 1;
            self.out[u].push(v);
        } else {
            self.free[v] -= 1;
            self.out[v].push(u);
        }
        self.accepted.push((u.min(v), u.max(v)));
        true
    }

    /// Moves one free pebble to `root` along a directed path that avoids
    /// `blocked`, reversing the path's edges.
    fn gather(&mut self, root: usize, blocked: usize) -> bool {
        let n = self.free.len();
        let mut parent = vec![usize::MAX; n];
        let mut visited = vec![false; n];
        visited[root] = true;
        visited[blocked] = true;
        let mut stack = vec![root];
        let mut found = None;
        'search: while let Some(x) = stack.pop() {
            for &y in &self.out[x] {
                if visited[y] {
                    continue;
                }
                visited[y] = true;
                parent[y] = x;
                if self.free[y] > 0 {
                    found = Some(y);
                    break 'search;
                }
                stack.push(y);
            }
        }
        let Some(mut y) = found else {
            return false;
        };
        self.free[y] -= 1;
        while y != root {
            let x = parent[y];
            // reverse x -> y into y -> x
            let pos = self.out[x].iter().position(|&w| w == y).expect("edge on path");
            self.out[x].swap_remove(pos);
            self.out[y].push(x);
            y = x;
        }
        self.free[root] += 1;
        true
    }
}

fn check_ell(ell: usize) {
    assert!(ell <= 3, "ell must lie in 0..=3, got {ell}");
}

/// Every subgraph with at least one edge has |E'| ≤ 2|V'| − ell.
pub fn is_sparse(g: &Graph, ell: usize) -> bool {
    check_ell(ell);
    let mut game = PebbleGame::new(g.n(), ell);
    g.edges().iter().all(|&(u, v)| game.try_add(u, v))
}

/// Sparse with exactly 2n − ell edges.
pub fn is_tight(g: &Graph, ell: usize) -> bool {
    g.m() + ell == 2 * g.n() && is_sparse(g, ell)
}

/// Count characterization of generic isostatic graphs on the sphere,
/// cylinder and cone.
pub fn combinatorial_isostatic(g: &Graph, kind: SurfaceKind) -> Result<bool> {
    if kind == SurfaceKind::Ellipsoid {
        return Err(RigidityError::CharacterizationUnknown);
    }
    let ell = kind.ell();
    let small_complete = g.is_complete() && g.n() + ell <= 5;
    Ok(small_complete || is_tight(g, ell))
}
