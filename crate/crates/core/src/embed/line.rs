//! Large-scale information network embedding by edge sampling.
//!
//! Each step draws a directed half-edge from an alias sampler, applies one
//! positive sigmoid update for the pair and `negative_ratio` negative
//! updates against noise nodes drawn proportional to degree^0.75. Order 1
//! models symmetric proximity with a single vector table; order 2 scores
//! sources against separate context vectors; `joint` trains both at half
//! the dimensionality and concatenates. The learning rate decays linearly
//! over the sample budget down to 1e-4 of its initial value.

use rand_chacha::ChaCha8Rng;

use super::gf::{dot, init_uniform};
use super::sampling::AliasTable;
use super::Embedding;
use crate::graph::Graph;
use crate::predict::sigmoid;
use crate::seeds::{stage_rng, streams};
use crate::{Error, Result};

pub const DEFAULT_RHO: f64 = 0.025;
pub const DEFAULT_NEGATIVE_RATIO: usize = 5;
/// Default total sample budget per train graph: 100 samples per edge.
pub const DEFAULT_BUDGET_PER_EDGE: usize = 100;
const NOISE_POWER: f64 = 0.75;
const MIN_RATE_FACTOR: f64 = 1e-4;
const FINITE_CHECK_EVERY: usize = 16_384;

/// Which proximity order to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrder {
    First,
    Second,
    Joint,
}

impl LineOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            LineOrder::First => "1",
            LineOrder::Second => "2",
            LineOrder::Joint => "joint",
        }
    }
}

impl std::fmt::Display for LineOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LineOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<LineOrder, String> {
        match s {
            "1" | "first" => Ok(LineOrder::First),
            "2" | "second" => Ok(LineOrder::Second),
            "joint" => Ok(LineOrder::Joint),
            other => Err(format!("unknown LINE order {other:?} (use 1, 2, or joint)")),
        }
    }
}

/// Train a LINE embedding. Deterministic given `seed`.
pub fn embed_line(
    g: &Graph,
    d: usize,
    order: LineOrder,
    rho: f64,
    negative_ratio: usize,
    budget: usize,
    seed: u64,
) -> Result<Embedding> {
    assert!(rho > 0.0, "initial learning rate must be positive");
    assert!(d >= 1 && budget >= 1, "dimension and budget must be positive");
    match order {
        LineOrder::Joint => {
            if d % 2 != 0 {
                return Err(Error::EmbedDim {
                    d,
                    n: g.n(),
                    msg: "joint order concatenates two halves; d must be even".into(),
                });
            }
            let mut first = train_order(
                g,
                d / 2,
                LineOrder::First,
                rho,
                negative_ratio,
                budget,
                stage_rng(seed, streams::LINE),
            )?;
            let second = train_order(
                g,
                d / 2,
                LineOrder::Second,
                rho,
                negative_ratio,
                budget,
                stage_rng(seed, streams::LINE_SECOND),
            )?;
            first = first.hconcat(&second);
            Ok(first)
        }
        single => train_order(
            g,
            d,
            single,
            rho,
            negative_ratio,
            budget,
            stage_rng(seed, streams::LINE),
        ),
    }
}

fn train_order(
    g: &Graph,
    d: usize,
    order: LineOrder,
    rho: f64,
    negative_ratio: usize,
    budget: usize,
    mut rng: ChaCha8Rng,
) -> Result<Embedding> {
    debug_assert!(matches!(order, LineOrder::First | LineOrder::Second));
    let n = g.n();
    // Directed half-edges (u, v) and (v, u) per undirected edge, sampled
    // uniformly through the alias table (unit weights).
    let mut half_edges = Vec::with_capacity(2 * g.edge_count());
    for (i, j) in g.edges() {
        half_edges.push((i, j));
        half_edges.push((j, i));
    }
    if half_edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let edge_sampler = AliasTable::new(&vec![1.0; half_edges.len()]);
    let noise_weights: Vec<f64> =
        (0..n).map(|i| (g.degree(i) as f64).powf(NOISE_POWER)).collect();
    let noise = AliasTable::new(&noise_weights);
    let mut vertex = init_uniform(n, d, &mut rng);
    let mut context = match order {
        LineOrder::Second => Some(Embedding::zeros(n, d)),
        _ => None,
    };
    let mut neu1e = vec![0.0; d];
    for t in 0..budget {
        let lr = rho * (1.0 - t as f64 / budget as f64).max(MIN_RATE_FACTOR);
        let (u, v) = half_edges[edge_sampler.sample(&mut rng)];
        neu1e.iter_mut().for_each(|x| *x = 0.0);
        // Targets never alias row u (no self-loops; negatives equal to an
        // endpoint are skipped), so a copy of the source row stays current
        // for the whole sample.
        let source = vertex.row(u).to_vec();
        for s in 0..=negative_ratio {
            let (target, label) = if s == 0 {
                (v, 1.0)
            } else {
                let w = noise.sample(&mut rng);
                if w == u || w == v {
                    continue;
                }
                (w, 0.0)
            };
            let tgt = match &mut context {
                Some(c) => c.row_mut(target),
                None => vertex.row_mut(target),
            };
            let f = dot(&source, tgt);
            let grad = (label - sigmoid(f)) * lr;
            for k in 0..d {
                neu1e[k] += grad * tgt[k];
                tgt[k] += grad * source[k];
            }
        }
        let src = vertex.row_mut(u);
        for k in 0..d {
            src[k] += neu1e[k];
        }
        if (t + 1) % FINITE_CHECK_EVERY == 0 && !vertex.is_finite() {
            return Err(Error::Diverged { method: "line", epoch: t });
        }
    }
    if !vertex.is_finite() {
        return Err(Error::Diverged { method: "line", epoch: budget });
    }
    Ok(vertex)
}

/// Loss of one (source, positive target, negative target) sample:
/// `-ln sigma(<x_u, x_v>) - ln sigma(-<x_u, x_w>)`. Shares its functional
/// form with the skip-gram objective; see [`super::sgns::sgns_triple_loss`].
pub fn line_sample_loss(u: &[f64], v: &[f64], w: &[f64]) -> f64 {
    super::sgns::sgns_triple_loss(u, v, w)
}

/// Analytic gradients of [`line_sample_loss`] in `(u, v, w)` order.
pub fn line_sample_grad(u: &[f64], v: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    super::sgns::sgns_triple_grad(u, v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn single_edge_first_order_saturates() {
        // One positive pair and no valid negatives: sigma(<x_0, x_1>)
        // must approach 1.
        let g = gen::path_graph(2);
        let emb = embed_line(&g, 2, LineOrder::First, 0.1, 5, 20_000, 0).unwrap();
        let p = sigmoid(dot(emb.row(0), emb.row(1)));
        assert!(p > 0.95, "sigma(<x_0,x_1>) = {p}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        let u = vec![0.25, -0.4];
        let v = vec![0.3, 0.1];
        let w = vec![-0.2, 0.5];
        let (gu, gv, gw) = line_sample_grad(&u, &v, &w);
        let h = 1e-6;
        for k in 0..2 {
            let fd = |which: usize| {
                let mut plus = [u.clone(), v.clone(), w.clone()];
                let mut minus = plus.clone();
                plus[which][k] += h;
                minus[which][k] -= h;
                (line_sample_loss(&plus[0], &plus[1], &plus[2])
                    - line_sample_loss(&minus[0], &minus[1], &minus[2]))
                    / (2.0 * h)
            };
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
            assert!(rel(gu[k], fd(0)) < 1e-5);
            assert!(rel(gv[k], fd(1)) < 1e-5);
            assert!(rel(gw[k], fd(2)) < 1e-5);
        }
    }

    #[test]
    fn joint_concatenates_halves() {
        let g = gen::random_connected(20, 30, 1);
        let joint = embed_line(&g, 8, LineOrder::Joint, 0.025, 5, 5_000, 9).unwrap();
        assert_eq!(joint.d(), 8);
        let first = embed_line(&g, 4, LineOrder::First, 0.025, 5, 5_000, 9).unwrap();
        for i in 0..g.n() {
            assert_eq!(&joint.row(i)[..4], first.row(i), "first half differs at node {i}");
        }
        assert!(matches!(
            embed_line(&g, 7, LineOrder::Joint, 0.025, 5, 100, 0),
            Err(Error::EmbedDim { d: 7, .. })
        ));
    }

    #[test]
    fn second_order_runs_and_is_deterministic() {
        let g = gen::random_connected(25, 40, 3);
        let a = embed_line(&g, 6, LineOrder::Second, 0.025, 5, 8_000, 5).unwrap();
        let b = embed_line(&g, 6, LineOrder::Second, 0.025, 5, 8_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.is_finite());
        let c = embed_line(&g, 6, LineOrder::Second, 0.025, 5, 8_000, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn order_strings_roundtrip() {
        for order in [LineOrder::First, LineOrder::Second, LineOrder::Joint] {
            assert_eq!(order.as_str().parse::<LineOrder>().unwrap(), order);
        }
        assert!("3".parse::<LineOrder>().is_err());
    }
}
