//! Deterministic graph generators.
//!
//! Classic fixed topologies (paths, cycles, cliques, stars) plus seeded
//! random families used for synthetic benchmarks and property tests. All
//! randomness comes from an explicit seed through ChaCha, so every generator
//! is reproducible across platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};

/// Path graph `0 - 1 - ... - (n-1)`.
pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
}

/// Cycle graph on `n >= 3` nodes.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
}

/// Complete graph on `n` nodes.
pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        .expect("valid clique")
}

/// Star with node 0 as center and `leaves` leaf nodes.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid star")
}

/// Erdos-Renyi graph `G(n, p)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

/// A connected graph: a random recursive tree plus `extra` random non-tree
/// edges (fewer if the graph saturates).
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    assert!(n >= 2, "need at least 2 nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n - 1 + extra);
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
        present.insert((u, v));
    }
    let max_extra = n * (n - 1) / 2 - (n - 1);
    let mut added = 0;
    let mut attempts = 0;
    while added < extra.min(max_extra) && attempts < 100 * (extra + 1) {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let e = crate::graph::canonical(a, b);
        if present.insert(e) {
            edges.push(e);
            added += 1;
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

/// Stochastic block model: `sizes[k]` nodes per block, edge probability
/// `p_in` within a block and `p_out` across blocks.
pub fn sbm(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Graph {
    let n: usize = sizes.iter().sum();
    let mut block = Vec::with_capacity(n);
    for (b, &s) in sizes.iter().enumerate() {
        block.extend(std::iter::repeat(b).take(s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

/// A toy relational-database graph with three node types: entities
/// (students), items (courses) and groups (tracks). Each student connects to
/// `items_per_entity` distinct courses and exactly one track; no edges exist
/// inside a type. Connected pairs of different types share no neighbors, so
/// common-neighbor heuristics rank true edges *below* random pairs — the
/// adversarial regime for neighborhood similarity.
pub fn relational(
    n_entities: usize,
    n_items: usize,
    n_groups: usize,
    items_per_entity: usize,
    seed: u64,
) -> Graph {
    assert!(items_per_entity <= n_items);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_entities + n_items + n_groups;
    let item_base = n_entities;
    let group_base = n_entities + n_items;
    let mut edges = Vec::new();
    let mut items: Vec<usize> = (0..n_items).collect();
    for s in 0..n_entities {
        items.shuffle(&mut rng);
        for &c in items.iter().take(items_per_entity) {
            edges.push((s, item_base + c));
        }
        if n_groups > 0 {
            edges.push((s, group_base + rng.gen_range(0..n_groups)));
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_shapes() {
        assert_eq!(path_graph(4).edge_count(), 3);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(complete(4).edge_count(), 6);
        assert_eq!(star(3).degree(0), 3);
    }

    #[test]
    fn seeded_generators_replay() {
        let a = erdos_renyi(30, 0.2, 9);
        let b = erdos_renyi(30, 0.2, 9);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let a = sbm(&[10, 10], 0.5, 0.05, 3);
        let b = sbm(&[10, 10], 0.5, 0.05, 3);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..5 {
            let g = random_connected(40, 25, seed);
            assert!(g.is_connected());
            assert!(g.edge_count() >= 39);
        }
    }

    #[test]
    fn relational_is_tripartite() {
        let g = relational(20, 8, 3, 3, 1);
        // No edges within a type.
        for (i, j) in g.edges() {
            let ty = |v: usize| {
                if v < 20 {
                    0
                } else if v < 28 {
                    1
                } else {
                    2
                }
            };
            assert_ne!(ty(i), ty(j));
        }
        // Every connected (entity, item) pair has zero common neighbors.
        for (i, j) in g.edges() {
            let ni = g.neighbors(i).unwrap();
            let nj = g.neighbors(j).unwrap();
            let common = ni.iter().filter(|v| nj.contains(v)).count();
            assert_eq!(common, 0);
        }
    }
}
