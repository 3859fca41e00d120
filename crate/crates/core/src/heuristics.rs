//! Neighborhood similarity heuristics.
//!
//! All scores are functions of the (train) graph's adjacency only. With
//! `Γ(i)` the neighbor set of `i`:
//!
//! * common neighbors `|Γ(i) ∩ Γ(j)|`
//! * Jaccard `|Γ(i) ∩ Γ(j)| / |Γ(i) ∪ Γ(j)|` (0 when the union is empty)
//! * Adamic-Adar `Σ_{k ∈ Γ(i) ∩ Γ(j)} 1 / ln |Γ(k)|`
//! * resource allocation `Σ_{k ∈ Γ(i) ∩ Γ(j)} 1 / |Γ(k)|`
//! * preferential attachment `|Γ(i)| · |Γ(j)|`
//!
//! Every common neighbor of a distinct pair has degree at least 2 in a
//! simple graph, so the Adamic-Adar logarithm never vanishes and all scores
//! are finite. The combined variant stacks all five scores into one feature
//! vector per pair for a downstream classifier.

use crate::graph::{Graph, Pair};
use crate::predict::Features;
use crate::{Error, Result};

/// The five similarity heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum HeuristicKind {
    CommonNeighbors,
    Jaccard,
    AdamicAdar,
    ResourceAllocation,
    PreferentialAttachment,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 5] = [
        HeuristicKind::CommonNeighbors,
        HeuristicKind::Jaccard,
        HeuristicKind::AdamicAdar,
        HeuristicKind::ResourceAllocation,
        HeuristicKind::PreferentialAttachment,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            HeuristicKind::CommonNeighbors => "cn",
            HeuristicKind::Jaccard => "jc",
            HeuristicKind::AdamicAdar => "aa",
            HeuristicKind::ResourceAllocation => "rai",
            HeuristicKind::PreferentialAttachment => "pa",
        }
    }
}

impl std::fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HeuristicKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cn" => Ok(HeuristicKind::CommonNeighbors),
            "jc" => Ok(HeuristicKind::Jaccard),
            "aa" => Ok(HeuristicKind::AdamicAdar),
            "rai" => Ok(HeuristicKind::ResourceAllocation),
            "pa" => Ok(HeuristicKind::PreferentialAttachment),
            other => Err(format!("unknown heuristic {other:?} (cn|jc|aa|rai|pa)")),
        }
    }
}

/// All five scores for one pair, in the order of [`HeuristicKind::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScores {
    pub cn: f64,
    pub jc: f64,
    pub aa: f64,
    pub rai: f64,
    pub pa: f64,
}

impl PairScores {
    pub fn get(&self, kind: HeuristicKind) -> f64 {
        match kind {
            HeuristicKind::CommonNeighbors => self.cn,
            HeuristicKind::Jaccard => self.jc,
            HeuristicKind::AdamicAdar => self.aa,
            HeuristicKind::ResourceAllocation => self.rai,
            HeuristicKind::PreferentialAttachment => self.pa,
        }
    }
}

/// Score one pair on the graph. The pair must reference valid, distinct
/// nodes. One sorted-list merge computes all five scores.
pub fn score_pair(g: &Graph, i: usize, j: usize) -> Result<PairScores> {
    let ni = g.neighbors(i)?;
    let nj = g.neighbors(j)?;
    if i == j {
        return Err(Error::SelfPair(i));
    }
    let (mut cn, mut aa, mut rai) = (0usize, 0.0f64, 0.0f64);
    let (mut a, mut b) = (0, 0);
    while a < ni.len() && b < nj.len() {
        match ni[a].cmp(&nj[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                let deg = g.degree(ni[a]) as f64;
                aa += 1.0 / deg.ln();
                rai += 1.0 / deg;
                cn += 1;
                a += 1;
                b += 1;
            }
        }
    }
    let union = ni.len() + nj.len() - cn;
    let jc = if union == 0 { 0.0 } else { cn as f64 / union as f64 };
    Ok(PairScores {
        cn: cn as f64,
        jc,
        aa,
        rai,
        pa: (ni.len() * nj.len()) as f64,
    })
}

/// Score many pairs with one heuristic.
pub fn heuristic_score(g: &Graph, pairs: &[Pair], kind: HeuristicKind) -> Result<Vec<f64>> {
    pairs.iter().map(|&(i, j)| Ok(score_pair(g, i, j)?.get(kind))).collect()
}

/// The stacked 5-feature representation: columns are
/// `(cn, jc, aa, rai, pa)` per pair, for use with a downstream classifier.
pub fn ne_heuristics_features(g: &Graph, pairs: &[Pair]) -> Result<Features> {
    let mut data = Vec::with_capacity(pairs.len() * 5);
    for &(i, j) in pairs {
        let s = score_pair(g, i, j)?;
        data.extend_from_slice(&[s.cn, s.jc, s.aa, s.rai, s.pa]);
    }
    Ok(Features::new(5, data))
}
