#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use surface_rigidity::graph::{is_k_connected, PebbleGame};
use surface_rigidity::Graph;

/// A random (2, ell)-tight graph: all pairs in random order, kept when the
/// pebble game accepts them.
pub fn random_tight_graph(n: usize, ell: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = all_pairs(n);
    pairs.shuffle(&mut rng);
    let mut game = PebbleGame::new(n, ell);
    for (u, v) in pairs {
        if game.accepted().len() + ell == 2 * n {
            break;
        }
        game.try_add(u, v);
    }
    Graph::new(n, game.accepted().to_vec()).unwrap()
}

/// A random 2-connected (2, ell)-tight graph.
pub fn random_tight_two_connected(n: usize, ell: usize, seed: u64) -> Graph {
    (0..)
        .map(|k| random_tight_graph(n, ell, seed.wrapping_mul(1000) + k))
        .find(|g| is_k_connected(g, 2))
        .unwrap()
}

/// A uniformly random graph with `n` vertices and `m` edges.
pub fn random_graph<R: rand::Rng>(n: usize, m: usize, rng: &mut R) -> Graph {
    let mut pairs = all_pairs(n);
    pairs.shuffle(rng);
    pairs.truncate(m);
    Graph::new(n, pairs).unwrap()
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// All graphs on `n` labeled vertices with exactly `m` edges.
pub fn graphs_with_edge_count(n: usize, m: usize) -> Vec<Graph> {
    let pairs = all_pairs(n);
    let mut out = Vec::new();
    let total = pairs.len();
    if m > total {
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(Graph::new(n, idx.iter().map(|&i| pairs[i])).unwrap());
        // next m-combination of 0..total
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + total - m {
                break;
            }
            if i == 0 && idx[0] == total - m {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn k5_plus_degree_two_vertex() -> Graph {
    let mut edges = Graph::complete(5).edges().to_vec();
    edges.push((0, 5));
    edges.push((1, 5));
    Graph::new(6, edges).unwrap()
}

pub fn two_k5_sharing_a_vertex() -> Graph {
    let k5 = Graph::complete(5);
    let mut edges = k5.edges().to_vec();
    edges.extend(k5.edges().iter().map(|&(u, v)| (u + 4, v + 4)));
    Graph::new(9, edges).unwrap()
}
