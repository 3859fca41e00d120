//! Node-pair features and binary classifiers.
//!
//! Embeddings give one vector per *node*; link prediction needs one vector
//! per *pair*. The four elementwise operators (average, Hadamard, absolute
//! difference, squared difference) build pair features, which feed a
//! classifier: logistic regression with a fixed penalty, logistic regression
//! with an internal cross-validated penalty, or a CART decision tree. All
//! fits are deterministic; the only randomness (fold assignment) comes from
//! an explicit seed.

mod logistic;
mod tree;

pub use logistic::{lr_fit, lr_gradient, lr_objective, lrcv_fit, stratified_folds, LinearModel};
pub use tree::{dt_fit, TreeModel};

use crate::embed::Embedding;
use crate::graph::Pair;
use crate::{Error, Result};

/// A dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    cols: usize,
    data: Vec<f64>,
}

impl Features {
    pub fn new(cols: usize, data: Vec<f64>) -> Features {
        assert!(cols > 0 && data.len() % cols == 0, "data length must be a multiple of cols");
        Features { cols, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Copy out a subset of rows (for cross-validation folds).
    pub fn subset(&self, rows: &[usize]) -> Features {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Features::new(self.cols, data)
    }
}

/// Elementwise node-pair operators, in canonical tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOperator {
    Average,
    Hadamard,
    WeightedL1,
    WeightedL2,
}

impl PairOperator {
    /// All operators in the order used to break validation-score ties.
    pub const ALL: [PairOperator; 4] = [
        PairOperator::Average,
        PairOperator::Hadamard,
        PairOperator::WeightedL1,
        PairOperator::WeightedL2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PairOperator::Average => "average",
            PairOperator::Hadamard => "hadamard",
            PairOperator::WeightedL1 => "weighted_l1",
            PairOperator::WeightedL2 => "weighted_l2",
        }
    }
}

impl std::fmt::Display for PairOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PairOperator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "average" => Ok(PairOperator::Average),
            "hadamard" => Ok(PairOperator::Hadamard),
            "weighted_l1" => Ok(PairOperator::WeightedL1),
            "weighted_l2" => Ok(PairOperator::WeightedL2),
            other => Err(format!(
                "unknown operator {other:?} (average|hadamard|weighted_l1|weighted_l2)"
            )),
        }
    }
}

/// Build pair features `op(x_i, x_j)` for each pair. Symmetric in the pair
/// orientation by construction. Errors on out-of-range nodes.
pub fn apply_operator(
    embedding: &Embedding,
    pairs: &[Pair],
    op: PairOperator,
) -> Result<Features> {
    let n = embedding.n();
    let d = embedding.d();
    let mut data = Vec::with_capacity(pairs.len() * d);
    for &(i, j) in pairs {
        if i >= n {
            return Err(Error::NodeOutOfRange { node: i, n });
        }
        if j >= n {
            return Err(Error::NodeOutOfRange { node: j, n });
        }
        let (xi, xj) = (embedding.row(i), embedding.row(j));
        match op {
            PairOperator::Average => {
                data.extend(xi.iter().zip(xj).map(|(a, b)| (a + b) / 2.0));
            }
            PairOperator::Hadamard => {
                data.extend(xi.iter().zip(xj).map(|(a, b)| a * b));
            }
            PairOperator::WeightedL1 => {
                data.extend(xi.iter().zip(xj).map(|(a, b)| (a - b).abs()));
            }
            PairOperator::WeightedL2 => {
                data.extend(xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)));
            }
        }
    }
    Ok(Features::new(d, data))
}

/// Per-column z-scoring fitted on train features and applied unchanged to
/// test features. Constant columns keep scale 1 to avoid division by zero.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Features) -> Standardizer {
        let (rows, cols) = (x.rows(), x.cols());
        let mut mean = vec![0.0; cols];
        for r in 0..rows {
            for (m, v) in mean.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= rows.max(1) as f64;
        }
        let mut var = vec![0.0; cols];
        for r in 0..rows {
            for (c, v) in x.row(r).iter().enumerate() {
                let dev = v - mean[c];
                var[c] += dev * dev;
            }
        }
        let scale = var
            .iter()
            .map(|&v| {
                let s = (v / rows.max(1) as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform(&self, x: &Features) -> Features {
        assert_eq!(x.cols(), self.mean.len(), "column count mismatch");
        let data = x
            .data()
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let c = idx % self.mean.len();
                (v - self.mean[c]) / self.scale[c]
            })
            .collect();
        Features::new(x.cols(), data)
    }
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Tree(TreeModel),
}

impl Model {
    /// Probability of the positive class per row.
    pub fn predict_proba(&self, x: &Features) -> Result<Vec<f64>> {
        match self {
            Model::Linear(m) => m.predict_proba(x),
            Model::Tree(m) => m.predict_proba(x),
        }
    }

    /// Serialize to a key-value text block (one `key = value` per line).
    pub fn to_kv(&self) -> String {
        match self {
            Model::Linear(m) => m.to_kv(),
            Model::Tree(m) => m.to_kv(),
        }
    }

    /// Parse a model serialized by [`Model::to_kv`].
    pub fn from_kv(text: &str) -> Result<Model> {
        let kind = text
            .lines()
            .find_map(|l| {
                let (k, v) = l.split_once('=')?;
                (k.trim() == "kind").then(|| v.trim().to_string())
            })
            .ok_or_else(|| Error::ModelFormat("missing 'kind' line".into()))?;
        match kind.as_str() {
            "linear" => Ok(Model::Linear(LinearModel::from_kv(text)?)),
            "tree" => Ok(Model::Tree(TreeModel::from_kv(text)?)),
            other => Err(Error::ModelFormat(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Numerically stable logistic sigmoid.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn kv_lookup<'a>(text: &'a str, key: &str) -> Result<&'a str> {
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
        .ok_or_else(|| Error::ModelFormat(format!("missing key {key:?}")))
}
