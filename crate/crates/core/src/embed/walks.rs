//! Second-order biased random walks.
//!
//! Walk generation follows the two-parameter scheme: standing at `v` having
//! arrived from `t`, the unnormalized probability of stepping to neighbor
//! `x` is `1/p` if `x = t` (return), `1` if `x` is adjacent to `t`
//! (distance 1), and `1/q` otherwise (distance 2). `p = q = 1` degenerates
//! to first-order uniform walks. Each pass shuffles the start-node order, as
//! the reference implementations do.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, NodeId};
use crate::seeds::{stage_rng, streams};

pub const DEFAULT_NUM_WALKS: usize = 10;
pub const DEFAULT_WALK_LEN: usize = 80;
pub const DEFAULT_P: f64 = 1.0;
pub const DEFAULT_Q: f64 = 1.0;

/// Walk parameters, kept with the corpus for bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub num_walks: usize,
    pub walk_len: usize,
    pub p: f64,
    pub q: f64,
}

/// A bag of truncated random walks over train-graph node ids.
#[derive(Debug, Clone)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<NodeId>>,
    pub params: WalkParams,
}

impl WalkCorpus {
    /// Total node positions across all walks.
    pub fn positions(&self) -> usize {
        self.walks.iter().map(|w| w.len()).sum()
    }
}

/// Generate `num_walks` walks from every node, each of up to `walk_len`
/// nodes. Deterministic given `seed`.
pub fn generate_walks(
    g: &Graph,
    num_walks: usize,
    walk_len: usize,
    p: f64,
    q: f64,
    seed: u64,
) -> WalkCorpus {
    assert!(num_walks >= 1 && walk_len >= 1, "walk counts must be positive");
    assert!(p > 0.0 && q > 0.0, "bias parameters must be positive");
    let mut rng = stage_rng(seed, streams::WALKS);
    let mut order: Vec<NodeId> = (0..g.n()).collect();
    let mut walks = Vec::with_capacity(g.n() * num_walks);
    for _ in 0..num_walks {
        order.shuffle(&mut rng);
        for &start in &order {
            walks.push(single_walk(g, start, walk_len, p, q, &mut rng));
        }
    }
    WalkCorpus { walks, params: WalkParams { num_walks, walk_len, p, q } }
}

fn single_walk(
    g: &Graph,
    start: NodeId,
    walk_len: usize,
    p: f64,
    q: f64,
    rng: &mut impl Rng,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(walk_len);
    walk.push(start);
    let mut weights: Vec<f64> = Vec::new();
    while walk.len() < walk_len {
        let cur = *walk.last().expect("walk is nonempty");
        let nbrs = g.adj(cur);
        if nbrs.is_empty() {
            break;
        }
        let next = if walk.len() == 1 {
            nbrs[rng.gen_range(0..nbrs.len())]
        } else {
            let prev = walk[walk.len() - 2];
            weights.clear();
            weights.extend(nbrs.iter().map(|&x| {
                if x == prev {
                    1.0 / p
                } else if g.has_edge(prev, x) {
                    1.0
                } else {
                    1.0 / q
                }
            }));
            let total: f64 = weights.iter().sum();
            let mut draw = rng.gen::<f64>() * total;
            let mut chosen = nbrs.len() - 1;
            for (idx, w) in weights.iter().enumerate() {
                draw -= w;
                if draw < 0.0 {
                    chosen = idx;
                    break;
                }
            }
            nbrs[chosen]
        };
        walk.push(next);
    }
    walk
}
