//! Vertex connectivity by counting internally vertex-disjoint paths.

use std::collections::VecDeque;

use super::Graph;

struct FlowNetwork {
    // (head, residual capacity, index of reverse arc)
    arcs: Vec<Vec<(usize, u32, usize)>>,
}

impl FlowNetwork {
    fn new(size: usize) -> Self {
        FlowNetwork {
            arcs: vec![Vec::new(); size],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        let rev_from = self.arcs[to].len();
        let rev_to = self.arcs[from].len();
        self.arcs[from].push((to, cap, rev_from));
        self.arcs[to].push((from, 0, rev_to));
    }

    /// Edmonds-Karp, stopping once `limit` units have been routed.
    fn max_flow(&mut self, source: usize, sink: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.arcs.len()];
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            while let Some(x) = queue.pop_front() {
                for (i, &(y, cap, _)) in self.arcs[x].iter().enumerate() {
                    if cap > 0 && y != source && prev[y].is_none() {
                        prev[y] = Some((x, i));
                        if y == sink {
                            reached = true;
                            break;
                        }
                        queue.push_back(y);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                break;
            }
            let mut y = sink;
            while let Some((x, i)) = prev[y] {
                let rev = self.arcs[x][i].2;
                self.arcs[x][i].1 -= 1;
                self.arcs[y][rev].1 += 1;
                y = x;
            }
            flow += 1;
        }
        flow
    }
}

/// Number of internally vertex-disjoint `s`–`t` paths for non-adjacent
/// `s`, `t`, capped at `limit`.
pub fn local_vertex_connectivity(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    debug_assert!(s != t && !g.has_edge(s, t));
    // vertex v splits into v_in = 2v and v_out = 2v + 1
    let n = g.n();
    let big = n as u32;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let cap = if v == s || v == t { big } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, cap);
    }
    for &(u, v) in g.edges() {
        net.add_arc(2 * u + 1, 2 * v, big);
        net.add_arc(2 * v + 1, 2 * u, big);
    }
    net.max_flow(2 * s + 1, 2 * t, limit)
}

/// True iff `g` has more than `k` vertices and no vertex cut of size < k.
pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    let n = g.n();
    if n <= k {
        return false;
    }
    if k == 0 {
        return true;
    }
    for s in 0..n {
        for t in s + 1..n {
            if !g.has_edge(s, t) && local_vertex_connectivity(g, s, t, k) < k {
                return false;
            }
        }
    }
    true
}
