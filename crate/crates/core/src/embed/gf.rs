//! Graph factorization.
//!
//! Learns one vector per node so that dot products reconstruct observed
//! edges: SGD over the edge set minimizing
//! `sum_{(i,j) in E} (1 - <z_i, z_j>)^2 + (lambda/2) * sum_i ||z_i||^2`.
//! Unobserved pairs contribute nothing; the ridge term keeps norms bounded.

use rand::seq::SliceRandom;
use rand::Rng;

use super::Embedding;
use crate::graph::{Graph, Pair};
use crate::seeds::{stage_rng, streams};
use crate::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.1;
pub const DEFAULT_LEARN_RATE: f64 = 0.01;
pub const DEFAULT_EPOCHS: usize = 100;

/// Train a graph-factorization embedding. Deterministic given `seed`.
pub fn embed_gf(
    g: &Graph,
    d: usize,
    lambda: f64,
    learn_rate: f64,
    epochs: usize,
    seed: u64,
) -> Result<Embedding> {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(lambda >= 0.0 && learn_rate > 0.0, "lambda >= 0 and learn rate > 0 required");
    let mut rng = stage_rng(seed, streams::GF);
    let mut emb = init_uniform(g.n(), d, &mut rng);
    let mut edges: Vec<Pair> = g.edges().collect();
    for epoch in 0..epochs {
        edges.shuffle(&mut rng);
        for &(i, j) in &edges {
            let (zi, zj) = emb.rows_mut2(i, j);
            let err = 1.0 - dot(zi, zj);
            for k in 0..d {
                let (a, b) = (zi[k], zj[k]);
                zi[k] = a + learn_rate * (2.0 * err * b - lambda * a);
                zj[k] = b + learn_rate * (2.0 * err * a - lambda * b);
            }
        }
        if !emb.is_finite() {
            return Err(Error::Diverged { method: "gf", epoch });
        }
    }
    Ok(emb)
}

/// Full objective value; exposed so tests can track descent.
pub fn gf_loss(g: &Graph, emb: &Embedding, lambda: f64) -> f64 {
    let edge_term: f64 = g
        .edges()
        .map(|(i, j)| {
            let err = 1.0 - dot(emb.row(i), emb.row(j));
            err * err
        })
        .sum();
    let reg_term: f64 = (0..emb.n()).map(|i| dot(emb.row(i), emb.row(i))).sum();
    edge_term + lambda / 2.0 * reg_term
}

/// The conventional word2vec-style init: entries uniform in [-0.5/d, 0.5/d].
pub(crate) fn init_uniform<R: Rng>(n: usize, d: usize, rng: &mut R) -> Embedding {
    let half = 0.5 / d as f64;
    let data = (0..n * d).map(|_| rng.gen_range(-half..half)).collect();
    Embedding::new(d, data)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn single_edge_dot_product_approaches_one() {
        let g = gen::path_graph(2);
        let emb = embed_gf(&g, 1, 0.0, 0.05, 400, 3).unwrap();
        let got = dot(emb.row(0), emb.row(1));
        assert!((got - 1.0).abs() < 1e-2, "dot product {got} not near 1");
    }

    #[test]
    fn triangle_residual_decreases_across_epochs() {
        let g = gen::cycle(3);
        let early = embed_gf(&g, 2, 0.0, 0.01, 5, 9).unwrap();
        let late = embed_gf(&g, 2, 0.0, 0.01, 200, 9).unwrap();
        assert!(gf_loss(&g, &late, 0.0) < gf_loss(&g, &early, 0.0));
    }

    #[test]
    fn loss_non_increasing_over_five_epoch_windows() {
        let g = gen::random_connected(40, 60, 5);
        let lambda = 0.1;
        let losses: Vec<f64> = (0..10)
            .map(|w| gf_loss(&g, &embed_gf(&g, 4, lambda, 0.01, 5 * (w + 1), 11).unwrap(), lambda))
            .collect();
        for w in losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "loss rose across a 5-epoch window: {losses:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let g = gen::random_connected(20, 20, 1);
        let a = embed_gf(&g, 3, 0.1, 0.01, 20, 42).unwrap();
        let b = embed_gf(&g, 3, 0.1, 0.01, 20, 42).unwrap();
        assert_eq!(a, b);
        let c = embed_gf(&g, 3, 0.1, 0.01, 20, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn divergence_reported_with_epoch() {
        let g = gen::complete(6);
        // An absurd learning rate blows the iterates up quickly.
        match embed_gf(&g, 2, 0.0, 1e6, 50, 0) {
            Err(Error::Diverged { method: "gf", .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
