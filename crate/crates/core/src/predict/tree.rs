//! CART decision tree with Gini impurity.
//!
//! Splits are exhaustive over features and midpoint thresholds between
//! adjacent distinct values; rows with `value <= threshold` go left. The
//! best split maximizes impurity decrease, with ties broken toward the
//! lowest feature index and then the lowest threshold, making the fit fully
//! deterministic. Growth stops at `max_depth`, on pure nodes, or when no
//! split can keep `min_leaf` rows in both children. Leaves predict the
//! positive-class fraction of their training rows.

use super::{kv_lookup, Features};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { prob: f64 },
}

/// A fitted decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    nodes: Vec<Node>,
    dim: usize,
}

impl TreeModel {
    pub fn predict_proba(&self, x: &Features) -> Result<Vec<f64>> {
        if x.cols() != self.dim {
            return Err(Error::FeatureDim { got: x.cols(), want: self.dim });
        }
        Ok((0..x.rows())
            .map(|r| {
                let row = x.row(r);
                let mut at = 0;
                loop {
                    match &self.nodes[at] {
                        Node::Leaf { prob } => return *prob,
                        Node::Split { feature, threshold, left, right } => {
                            at = if row[*feature] <= *threshold { *left } else { *right };
                        }
                    }
                }
            })
            .collect())
    }

    /// Depth of the tree (a lone leaf has depth 0).
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn to_kv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "kind = tree").unwrap();
        writeln!(out, "dim = {}", self.dim).unwrap();
        writeln!(out, "nodes = {}", self.nodes.len()).unwrap();
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Split { feature, threshold, left, right } => {
                    writeln!(out, "node{i} = split {feature} {threshold} {left} {right}").unwrap();
                }
                Node::Leaf { prob } => writeln!(out, "node{i} = leaf {prob}").unwrap(),
            }
        }
        out
    }

    pub fn from_kv(text: &str) -> Result<TreeModel> {
        let bad = |msg: String| Error::ModelFormat(msg);
        let dim: usize =
            kv_lookup(text, "dim")?.parse().map_err(|_| bad("invalid dim".into()))?;
        let count: usize =
            kv_lookup(text, "nodes")?.parse().map_err(|_| bad("invalid node count".into()))?;
        let mut nodes = Vec::with_capacity(count);
        for i in 0..count {
            let val = kv_lookup(text, &format!("node{i}"))?;
            let toks: Vec<&str> = val.split_whitespace().collect();
            let node = match toks.as_slice() {
                ["split", f, t, l, r] => Node::Split {
                    feature: f.parse().map_err(|_| bad(format!("node{i}: bad feature")))?,
                    threshold: t.parse().map_err(|_| bad(format!("node{i}: bad threshold")))?,
                    left: l.parse().map_err(|_| bad(format!("node{i}: bad child")))?,
                    right: r.parse().map_err(|_| bad(format!("node{i}: bad child")))?,
                },
                ["leaf", p] => Node::Leaf {
                    prob: p.parse().map_err(|_| bad(format!("node{i}: bad prob")))?,
                },
                _ => return Err(bad(format!("node{i}: unrecognized {val:?}"))),
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(bad("tree has no nodes".into()));
        }
        Ok(TreeModel { nodes, dim })
    }
}

/// Gini impurity of a node with `pos` positives out of `total`.
fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

/// Fit a tree. `max_depth >= 1` bounds split depth; `min_leaf >= 1` is the
/// minimum rows per leaf.
pub fn dt_fit(x: &Features, y: &[bool], max_depth: usize, min_leaf: usize) -> Result<TreeModel> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch { labels: y.len(), scores: x.rows() });
    }
    if x.rows() == 0 {
        return Err(Error::SingleClass);
    }
    assert!(max_depth >= 1 && min_leaf >= 1);
    let mut nodes = Vec::new();
    let rows: Vec<usize> = (0..x.rows()).collect();
    grow(x, y, rows, 0, max_depth, min_leaf, &mut nodes);
    Ok(TreeModel { nodes, dim: x.cols() })
}

fn grow(
    x: &Features,
    y: &[bool],
    rows: Vec<usize>,
    depth: usize,
    max_depth: usize,
    min_leaf: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let total = rows.len() as f64;
    let pos = rows.iter().filter(|&&r| y[r]).count() as f64;
    let node_gini = gini(pos, total);
    let make_leaf = |nodes: &mut Vec<Node>| {
        nodes.push(Node::Leaf { prob: pos / total });
        nodes.len() - 1
    };
    if depth >= max_depth || node_gini == 0.0 || rows.len() < 2 * min_leaf {
        return make_leaf(nodes);
    }
    let best = find_best_split(x, y, &rows, node_gini, min_leaf);
    let Some(best) = best else {
        return make_leaf(nodes);
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
        rows.into_iter().partition(|&r| x.row(r)[best.feature] <= best.threshold);
    // Reserve this node's slot before recursing so child indices are stable.
    let at = nodes.len();
    nodes.push(Node::Leaf { prob: 0.0 });
    let left = grow(x, y, left_rows, depth + 1, max_depth, min_leaf, nodes);
    let right = grow(x, y, right_rows, depth + 1, max_depth, min_leaf, nodes);
    nodes[at] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
    at
}

fn find_best_split(
    x: &Features,
    y: &[bool],
    rows: &[usize],
    node_gini: f64,
    min_leaf: usize,
) -> Option<BestSplit> {
    let total = rows.len() as f64;
    let total_pos = rows.iter().filter(|&&r| y[r]).count() as f64;
    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = rows.to_vec();
    for feature in 0..x.cols() {
        order.sort_by(|&a, &b| {
            x.row(a)[feature].partial_cmp(&x.row(b)[feature]).expect("non-NaN features")
        });
        let mut left_n = 0.0;
        let mut left_pos = 0.0;
        for k in 0..order.len() - 1 {
            let r = order[k];
            left_n += 1.0;
            if y[r] {
                left_pos += 1.0;
            }
            let (v, next) = (x.row(r)[feature], x.row(order[k + 1])[feature]);
            if v == next {
                continue; // threshold must separate distinct values
            }
            let right_n = total - left_n;
            if (left_n as usize) < min_leaf || (right_n as usize) < min_leaf {
                continue;
            }
            let right_pos = total_pos - left_pos;
            let weighted = (left_n * gini(left_pos, left_n)
                + right_n * gini(right_pos, right_n))
                / total;
            let decrease = node_gini - weighted;
            let threshold = (v + next) / 2.0;
            // Strict improvement keeps the lowest feature, then lowest
            // threshold (scan order is ascending in both). Zero-gain splits
            // of impure nodes are allowed, as in standard CART: cases like
            // XOR only separate two levels down.
            let take = match &best {
                Some(b) => decrease > b.decrease,
                None => true,
            };
            if take {
                best = Some(BestSplit { feature, threshold, decrease });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_labels_single_leaf() {
        let x = Features::new(1, vec![1.0, 2.0, 3.0]);
        let y = [true, true, true];
        let t = dt_fit(&x, &y, 10, 1).unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.predict_proba(&x).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = Features::new(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let y = [false, true, true, false];
        let t = dt_fit(&x, &y, 2, 1).unwrap();
        assert_eq!(t.depth(), 2);
        let p = t.predict_proba(&x).unwrap();
        let acc = p
            .iter()
            .zip(&y)
            .filter(|(p, &l)| (**p > 0.5) == l)
            .count();
        assert_eq!(acc, 4);
    }

    #[test]
    fn depth_and_min_leaf_are_respected() {
        let x = Features::new(1, (0..64).map(|i| i as f64).collect());
        let y: Vec<bool> = (0..64).map(|i| (i / 4) % 2 == 0).collect();
        let t = dt_fit(&x, &y, 3, 1).unwrap();
        assert!(t.depth() <= 3);
        let t = dt_fit(&x, &y, 20, 16).unwrap();
        // min_leaf 16 over 64 rows allows at most 4 leaves => depth <= 3.
        assert!(t.depth() <= 3);
    }

    #[test]
    fn probabilities_in_unit_interval() {
        let x = Features::new(1, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = [false, true, false, true, true, false];
        let t = dt_fit(&x, &y, 2, 2).unwrap();
        for p in t.predict_proba(&x).unwrap() {
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn feature_dim_checked() {
        let x = Features::new(2, vec![0.0, 1.0, 1.0, 0.0]);
        let y = [false, true];
        let t = dt_fit(&x, &y, 2, 1).unwrap();
        let bad = Features::new(3, vec![0.0, 1.0, 2.0]);
        assert!(matches!(t.predict_proba(&bad), Err(Error::FeatureDim { got: 3, want: 2 })));
    }

    #[test]
    fn kv_roundtrip() {
        let x = Features::new(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let y = [false, true, true, false];
        let t = dt_fit(&x, &y, 2, 1).unwrap();
        let r = TreeModel::from_kv(&t.to_kv()).unwrap();
        assert_eq!(r, t);
        assert_eq!(r.predict_proba(&x).unwrap(), t.predict_proba(&x).unwrap());
    }
}
