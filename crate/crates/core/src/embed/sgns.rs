//! Skip-gram with negative sampling over a walk corpus.
//!
//! Word2vec-style training: each (center, context) pair inside a fixed
//! window contributes one positive update and `negatives` noise updates,
//! with noise drawn from the corpus unigram distribution raised to 0.75.
//! Separate input (`W`) and output (`C`) vector tables are kept; the input
//! table is the embedding. The learning rate decays linearly over all
//! scheduled center positions down to 1e-4 of its initial value.

use super::gf::{dot, init_uniform};
use super::sampling::AliasTable;
use super::walks::WalkCorpus;
use super::Embedding;
use crate::predict::sigmoid;
use crate::seeds::{stage_rng, streams};
use crate::{Error, Result};

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_NEGATIVES: usize = 5;
pub const DEFAULT_LEARN_RATE: f64 = 0.025;
pub const DEFAULT_EPOCHS: usize = 1;
const NOISE_POWER: f64 = 0.75;
const MIN_RATE_FACTOR: f64 = 1e-4;

/// Train skip-gram embeddings for nodes `0..n-1`. Deterministic given
/// `seed`; the corpus order is consumed as generated.
pub fn train_sgns(
    corpus: &WalkCorpus,
    n: usize,
    d: usize,
    window: usize,
    negatives: usize,
    learn_rate: f64,
    epochs: usize,
    seed: u64,
) -> Result<Embedding> {
    Ok(train_sgns_tables(corpus, n, d, window, negatives, learn_rate, epochs, seed)?.0)
}

/// Like [`train_sgns`] but also returns the output (context) table, which
/// tests use to probe the training dynamics.
#[allow(clippy::too_many_arguments)]
pub(crate) fn train_sgns_tables(
    corpus: &WalkCorpus,
    n: usize,
    d: usize,
    window: usize,
    negatives: usize,
    learn_rate: f64,
    epochs: usize,
    seed: u64,
) -> Result<(Embedding, Embedding)> {
    assert!(!corpus.walks.is_empty(), "corpus must be non-empty");
    assert!(window >= 1 && d >= 1 && epochs >= 1, "window, d, epochs must be positive");
    assert!(learn_rate > 0.0, "learning rate must be positive");
    let mut counts = vec![0f64; n];
    for walk in &corpus.walks {
        for &node in walk {
            assert!(node < n, "corpus node {node} outside 0..{n}");
            counts[node] += 1.0;
        }
    }
    let noise = AliasTable::new(
        &counts.iter().map(|c| c.powf(NOISE_POWER)).collect::<Vec<_>>(),
    );
    let mut rng = stage_rng(seed, streams::SGNS);
    let mut w = init_uniform(n, d, &mut rng);
    let mut c = Embedding::zeros(n, d);
    let total_positions = (epochs * corpus.positions()) as f64;
    let mut processed = 0f64;
    let mut neu1e = vec![0.0; d];
    for epoch in 0..epochs {
        for walk in &corpus.walks {
            for (i, &center) in walk.iter().enumerate() {
                let alpha = learn_rate
                    * (1.0 - processed / total_positions).max(MIN_RATE_FACTOR);
                processed += 1.0;
                let lo = i.saturating_sub(window);
                let hi = (i + window).min(walk.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = walk[j];
                    neu1e.iter_mut().for_each(|v| *v = 0.0);
                    // Targets update the output table only, so a copy of
                    // the input row stays current for the whole window pair.
                    let wc = w.row(center).to_vec();
                    for t in 0..=negatives {
                        let (target, label) = if t == 0 {
                            (context, 1.0)
                        } else {
                            let s = noise.sample(&mut rng);
                            if s == context {
                                continue;
                            }
                            (s, 0.0)
                        };
                        let ct = c.row_mut(target);
                        let f = dot(&wc, ct);
                        let g = (label - sigmoid(f)) * alpha;
                        for k in 0..d {
                            neu1e[k] += g * ct[k];
                            ct[k] += g * wc[k];
                        }
                    }
                    let wc = w.row_mut(center);
                    for k in 0..d {
                        wc[k] += neu1e[k];
                    }
                }
            }
        }
        if !w.is_finite() || !c.is_finite() {
            return Err(Error::Diverged { method: "sgns", epoch });
        }
    }
    Ok((w, c))
}

/// Loss of one (center, positive context, negative) triple:
/// `-ln sigma(<x, c+>) - ln sigma(-<x, c->)`.
pub fn sgns_triple_loss(x: &[f64], c_pos: &[f64], c_neg: &[f64]) -> f64 {
    -ln_sigmoid(dot(x, c_pos)) - ln_sigmoid(-dot(x, c_neg))
}

/// Analytic gradients of [`sgns_triple_loss`] in `(x, c_pos, c_neg)` order.
pub fn sgns_triple_grad(
    x: &[f64],
    c_pos: &[f64],
    c_neg: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let gp = sigmoid(dot(x, c_pos)) - 1.0;
    let gn = sigmoid(dot(x, c_neg));
    let gx = x
        .iter()
        .enumerate()
        .map(|(k, _)| gp * c_pos[k] + gn * c_neg[k])
        .collect();
    let gcp = x.iter().map(|&v| gp * v).collect();
    let gcn = x.iter().map(|&v| gn * v).collect();
    (gx, gcp, gcn)
}

/// Numerically stable `ln(sigma(z))`.
fn ln_sigmoid(z: f64) -> f64 {
    -((-z).max(0.0) + (-z.abs()).exp().ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::walks::generate_walks;
    use crate::gen;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_sigmoid_is_stable_and_correct() {
        for z in [-30.0, -2.0, -0.1, 0.0, 0.1, 2.0, 30.0] {
            assert_abs_diff_eq!(ln_sigmoid(z), sigmoid(z).ln(), epsilon = 1e-12);
        }
        assert!(ln_sigmoid(-800.0).is_finite());
    }

    #[test]
    fn positive_pair_attraction_on_two_nodes() {
        // With only two nodes every context is the other node, so the
        // input/output alignment <x_0, c_1> must grow positive with
        // training (negatives disabled to isolate the attraction term).
        let g = gen::path_graph(2);
        let corpus = generate_walks(&g, 10, 20, 1.0, 1.0, 0);
        let score = |epochs| {
            let (w, c) =
                train_sgns_tables(&corpus, 2, 2, 2, 0, 0.05, epochs, 1).unwrap();
            dot(w.row(0), c.row(1))
        };
        let early = score(1);
        let late = score(4);
        assert!(early > 0.0, "alignment not positive after one epoch: {early}");
        assert!(late > early, "alignment did not grow: {early} -> {late}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let x = vec![0.3, -0.2, 0.5];
        let cp = vec![-0.4, 0.1, 0.2];
        let cn = vec![0.2, 0.6, -0.3];
        let (gx, gcp, gcn) = sgns_triple_grad(&x, &cp, &cn);
        let h = 1e-6;
        let fd = |vec: &[f64], k: usize, which: usize| {
            let mut plus = [x.clone(), cp.clone(), cn.clone()];
            let mut minus = plus.clone();
            plus[which][k] = vec[k] + h;
            minus[which][k] = vec[k] - h;
            (sgns_triple_loss(&plus[0], &plus[1], &plus[2])
                - sgns_triple_loss(&minus[0], &minus[1], &minus[2]))
                / (2.0 * h)
        };
        for k in 0..3 {
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
            assert!(rel(gx[k], fd(&x, k, 0)) < 1e-5, "x[{k}]");
            assert!(rel(gcp[k], fd(&cp, k, 1)) < 1e-5, "c_pos[{k}]");
            assert!(rel(gcn[k], fd(&cn, k, 2)) < 1e-5, "c_neg[{k}]");
        }
    }

    #[test]
    fn deterministic_and_finite_on_small_graph() {
        let g = gen::random_connected(20, 25, 3);
        let corpus = generate_walks(&g, 3, 15, 1.0, 1.0, 4);
        let a = train_sgns(&corpus, 20, 8, 5, 5, 0.025, 1, 7).unwrap();
        let b = train_sgns(&corpus, 20, 8, 5, 5, 0.025, 1, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_finite());
        assert_eq!(a.n(), 20);
        assert_eq!(a.d(), 8);
    }
}
