//! Train/test edge splits and non-edge sampling.
//!
//! A split partitions the edges of a (connected) graph into a train set and
//! a held-out test set, then samples non-edges as negatives. Strategies:
//!
//! * `random` — uniform edge removal; the train graph is the main component
//!   of what remains, so nodes can be lost, and preliminary test edges with
//!   an endpoint outside that component are discarded ("refined").
//! * `st` — a uniform spanning tree (Wilson's algorithm) seeds the train
//!   set, topped up with random extra edges; connectivity and the full node
//!   set are preserved and `|e_train| = round(f |E|)` exactly.
//! * `dft` — as `st` but the backbone is a deterministic depth-first tree
//!   rooted at node 0 with ascending neighbor order.
//! * `timestamp` — newest edges become test edges, skipping any edge whose
//!   removal would disconnect the train graph.
//!
//! Non-edges are open-world: train non-edges exclude only train edges (so a
//! held-out edge can appear as a train negative, exactly as at deployment
//! time, where an unobserved pair may be a future link), while test
//! non-edges exclude all edges of the source graph and the train non-edges.
//! Endpoints are restricted to train-graph nodes so every sampled pair is
//! scoreable from train-side information.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{canonical, Graph, NodeId, Pair, TimestampedEdgeList};
use crate::seeds::{stage_rng, streams, VALIDATION_SALT};
use crate::{Error, Result};

/// Train fraction used for inner (validation) splits.
pub const VALIDATION_TRAIN_F: f64 = 0.9;

/// How a graph's edges are divided into train and test sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitStrategy {
    Random,
    /// Uniform spanning tree backbone.
    St,
    /// Depth-first tree backbone.
    Dft,
    Timestamp,
}

impl SplitStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitStrategy::Random => "random",
            SplitStrategy::St => "st",
            SplitStrategy::Dft => "dft",
            SplitStrategy::Timestamp => "timestamp",
        }
    }
}

impl std::fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SplitStrategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(SplitStrategy::Random),
            "st" => Ok(SplitStrategy::St),
            "dft" => Ok(SplitStrategy::Dft),
            "timestamp" => Ok(SplitStrategy::Timestamp),
            other => Err(format!("unknown split strategy {other:?} (random|st|dft|timestamp)")),
        }
    }
}

/// Options that modify sampling behavior.
#[derive(Debug, Clone, Default)]
pub struct SplitConfig {
    /// Exclude held-out test edges from the train non-edge pool (closed-world
    /// negatives). Off by default: open-world sampling.
    pub strict_train_nonedges: bool,
}

/// Edge-side result of a split, before non-edge sampling.
#[derive(Debug, Clone)]
pub struct SplitParts {
    /// Train edges, canonical pairs in source ids, sorted.
    pub e_train: Vec<Pair>,
    /// Refined test edges, canonical pairs in source ids, sorted.
    pub e_test: Vec<Pair>,
    /// The graph induced by `e_train`: its node `k` is source node
    /// `train_nodes[k]` and its edge set is exactly `e_train`.
    pub train_graph: Graph,
    /// Sorted source ids of train-graph nodes.
    pub train_nodes: Vec<NodeId>,
    /// Achieved train fraction `|e_train| / |E|`.
    pub actual_f: f64,
    /// Timestamp strategy only: the requested test budget was not reachable
    /// without disconnecting the train graph.
    pub shortfall: bool,
    /// Timestamp strategy only: train edges with their timestamps, enabling
    /// a timestamp-consistent validation split.
    pub train_timestamps: Option<Vec<(NodeId, NodeId, i64)>>,
}

/// A complete split: edges plus sampled non-edges.
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    pub strategy: SplitStrategy,
    /// Requested train fraction.
    pub f: f64,
    pub seed: u64,
    pub e_train: Vec<Pair>,
    pub e_test: Vec<Pair>,
    /// Train non-edges (may contain test edges under open-world sampling).
    pub d_train: Vec<Pair>,
    /// Test non-edges: not edges of the source graph, not in `d_train`.
    pub d_test: Vec<Pair>,
    pub train_graph: Graph,
    pub train_nodes: Vec<NodeId>,
    pub actual_f: f64,
    pub shortfall: bool,
    pub train_timestamps: Option<Vec<(NodeId, NodeId, i64)>>,
}

impl EdgeSplit {
    /// Map a source-id pair into train-graph ids, if both endpoints survive.
    pub fn to_train_pair(&self, p: Pair) -> Option<Pair> {
        let a = self.train_nodes.binary_search(&p.0).ok()?;
        let b = self.train_nodes.binary_search(&p.1).ok()?;
        Some(canonical(a, b))
    }

    /// Map many pairs; any endpoint missing from the train graph is an error
    /// (refinement guarantees this never happens for this split's own sets).
    pub fn to_train_pairs(&self, pairs: &[Pair]) -> Result<Vec<Pair>> {
        pairs
            .iter()
            .map(|&p| {
                self.to_train_pair(p).ok_or(Error::NodeOutOfRange {
                    node: p.0.max(p.1),
                    n: self.train_nodes.len(),
                })
            })
            .collect()
    }

    /// Fraction of source nodes absent from the train graph.
    pub fn node_loss(&self, source_nodes: usize) -> f64 {
        1.0 - self.train_nodes.len() as f64 / source_nodes as f64
    }
}

fn check_connected(g: &Graph) -> Result<()> {
    let (_, components) = g.component_labels();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

fn check_fraction(f: f64) -> Result<()> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::TrainFraction { f });
    }
    Ok(())
}

/// Uniform spanning tree of a connected graph via Wilson's algorithm
/// (loop-erased random walks from each node to the growing tree). Every
/// spanning tree is returned with equal probability; the result is
/// deterministic given the seed.
pub fn wilson_ust(g: &Graph, seed: u64) -> Result<Vec<Pair>> {
    check_connected(g)?;
    let n = g.n();
    let mut rng = stage_rng(seed, streams::WILSON);
    let mut in_tree = vec![false; n];
    let mut next: Vec<NodeId> = vec![usize::MAX; n];
    if n > 0 {
        in_tree[0] = true;
    }
    for start in 0..n {
        // Random walk until the tree is hit; cycles are erased implicitly by
        // overwriting `next` on revisits.
        let mut u = start;
        while !in_tree[u] {
            let nb = g.adj(u);
            next[u] = nb[rng.gen_range(0..nb.len())];
            u = next[u];
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    let mut tree: Vec<Pair> = (1..n).map(|u| canonical(u, next[u])).collect();
    tree.sort_unstable();
    Ok(tree)
}

/// Deterministic depth-first spanning tree rooted at node 0, visiting
/// neighbors in ascending id order (faithful to the recursive traversal).
pub fn dfs_tree(g: &Graph) -> Result<Vec<Pair>> {
    check_connected(g)?;
    let n = g.n();
    let mut visited = vec![false; n];
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    if n > 0 {
        visited[0] = true;
    }
    let mut stack: Vec<(NodeId, usize)> = vec![(0, 0)];
    while let Some((u, idx)) = stack.pop() {
        let nb = g.adj(u);
        if idx < nb.len() {
            stack.push((u, idx + 1));
            let v = nb[idx];
            if !visited[v] {
                visited[v] = true;
                tree.push(canonical(u, v));
                stack.push((v, 0));
            }
        }
    }
    tree.sort_unstable();
    Ok(tree)
}

/// Split the edges of a connected graph with a non-timestamp strategy.
///
/// `st`/`dft` keep every node and exactly `round(f |E|)` train edges, or
/// fail if that target cannot cover a spanning tree. `random` removes
/// `|E| - round(f |E|)` edges uniformly; the train graph is the main
/// component of the remainder and test edges are refined against it.
pub fn split_edges(
    g: &Graph,
    strategy: SplitStrategy,
    f: f64,
    seed: u64,
) -> Result<SplitParts> {
    check_fraction(f)?;
    check_connected(g)?;
    let m = g.edge_count();
    let n = g.n();
    let target_train = (f * m as f64).round() as usize;
    match strategy {
        SplitStrategy::Timestamp => Err(Error::Config {
            line: None,
            msg: "timestamp splits need a timestamped edge list; use split_timestamp".into(),
        }),
        SplitStrategy::Random => {
            let num_test = m - target_train;
            let edges: Vec<Pair> = g.edges().collect();
            let mut idx: Vec<usize> = (0..m).collect();
            let mut rng = stage_rng(seed, streams::EDGE_PICK);
            let (picked, _) = idx.partial_shuffle(&mut rng, num_test);
            let mut is_test = vec![false; m];
            for &i in picked.iter() {
                is_test[i] = true;
            }
            let remainder: Vec<Pair> =
                (0..m).filter(|&i| !is_test[i]).map(|i| edges[i]).collect();
            let prelim_test: Vec<Pair> =
                (0..m).filter(|&i| is_test[i]).map(|i| edges[i]).collect();
            // Main component of the remainder, computed over the full node
            // set so component ids stay source ids.
            let rem_graph = Graph::from_edges(n, remainder.iter().copied())?;
            let (_, train_nodes) = rem_graph.main_component();
            let in_comp = |p: &Pair| {
                train_nodes.binary_search(&p.0).is_ok() && train_nodes.binary_search(&p.1).is_ok()
            };
            let mut e_train: Vec<Pair> = remainder.into_iter().filter(|p| in_comp(p)).collect();
            let mut e_test: Vec<Pair> = prelim_test.into_iter().filter(|p| in_comp(p)).collect();
            e_train.sort_unstable();
            e_test.sort_unstable();
            let train_graph = Graph::from_parent_edges(g, &train_nodes, &e_train);
            let actual_f = e_train.len() as f64 / m as f64;
            Ok(SplitParts {
                e_train,
                e_test,
                train_graph,
                train_nodes,
                actual_f,
                shortfall: false,
                train_timestamps: None,
            })
        }
        SplitStrategy::St | SplitStrategy::Dft => {
            let tree = match strategy {
                SplitStrategy::St => wilson_ust(g, seed)?,
                _ => dfs_tree(g)?,
            };
            if target_train < tree.len() {
                return Err(Error::TrainFractionBelowTree {
                    f,
                    target: target_train,
                    tree: tree.len(),
                    n,
                    min_f: tree.len() as f64 / m as f64,
                });
            }
            let tree_set: HashSet<Pair> = tree.iter().copied().collect();
            let mut rest: Vec<Pair> = g.edges().filter(|e| !tree_set.contains(e)).collect();
            let extra = target_train - tree.len();
            let mut rng = stage_rng(seed, streams::EDGE_PICK);
            let (picked, leftover) = rest.partial_shuffle(&mut rng, extra);
            let mut e_train: Vec<Pair> = tree;
            e_train.extend_from_slice(picked);
            let mut e_test: Vec<Pair> = leftover.to_vec();
            e_train.sort_unstable();
            e_test.sort_unstable();
            let train_nodes: Vec<NodeId> = (0..n).collect();
            let train_graph = Graph::from_parent_edges(g, &train_nodes, &e_train);
            let actual_f = e_train.len() as f64 / m as f64;
            Ok(SplitParts {
                e_train,
                e_test,
                train_graph,
                train_nodes,
                actual_f,
                shortfall: false,
                train_timestamps: None,
            })
        }
    }
}

/// Whether removing `skip` (on top of `removed`) keeps its endpoints
/// connected.
fn connected_without(g: &Graph, removed: &HashSet<Pair>, skip: Pair) -> bool {
    let (src, dst) = skip;
    let mut seen = vec![false; g.n()];
    let mut stack = vec![src];
    seen[src] = true;
    while let Some(u) = stack.pop() {
        for &v in g.adj(u) {
            let e = canonical(u, v);
            if e == skip || removed.contains(&e) || seen[v] {
                continue;
            }
            if v == dst {
                return true;
            }
            seen[v] = true;
            stack.push(v);
        }
    }
    false
}

/// Timestamp split: walk edges newest-first (timestamp ties broken by
/// canonical edge order) and move each to the test set unless removing it
/// would disconnect the train graph. Deterministic — no randomness is
/// involved. If the budget `|E| - round(f |E|)` cannot be reached the
/// achievable split is returned with `shortfall` set.
pub fn split_timestamp(tg: &TimestampedEdgeList, f: f64) -> Result<SplitParts> {
    check_fraction(f)?;
    let g = tg.static_graph();
    check_connected(&g)?;
    let m = g.edge_count();
    let budget = m - (f * m as f64).round() as usize;
    let mut ordered: Vec<(i64, Pair)> =
        tg.edges().iter().map(|&(i, j, t)| (t, (i, j))).collect();
    ordered.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut removed: HashSet<Pair> = HashSet::new();
    let mut e_test: Vec<Pair> = Vec::with_capacity(budget);
    for &(_, e) in &ordered {
        if e_test.len() == budget {
            break;
        }
        if connected_without(&g, &removed, e) {
            removed.insert(e);
            e_test.push(e);
        }
    }
    let shortfall = e_test.len() < budget;
    let mut e_train: Vec<Pair> = g.edges().filter(|e| !removed.contains(e)).collect();
    e_train.sort_unstable();
    e_test.sort_unstable();
    let train_timestamps: Vec<(NodeId, NodeId, i64)> = tg
        .edges()
        .iter()
        .filter(|&&(i, j, _)| !removed.contains(&(i, j)))
        .copied()
        .collect();
    let train_nodes: Vec<NodeId> = (0..g.n()).collect();
    let train_graph = Graph::from_parent_edges(&g, &train_nodes, &e_train);
    let actual_f = e_train.len() as f64 / m as f64;
    Ok(SplitParts {
        e_train,
        e_test,
        train_graph,
        train_nodes,
        actual_f,
        shortfall,
        train_timestamps: Some(train_timestamps),
    })
}

/// Sample train and test non-edges for a split.
///
/// Both endpoint universes are the train-graph nodes. Train non-edges
/// exclude train edges (plus test edges when
/// [`SplitConfig::strict_train_nonedges`] is set); test non-edges exclude
/// every edge of the source graph and the train non-edges. Sampling is
/// uniform without replacement by rejection, switching to exhaustive
/// enumeration plus shuffle when the exclusion density makes rejection
/// wasteful; either path is deterministic given the seed.
pub fn sample_non_edges(
    g: &Graph,
    parts: &SplitParts,
    n_train: usize,
    n_test: usize,
    seed: u64,
    cfg: &SplitConfig,
) -> Result<(Vec<Pair>, Vec<Pair>)> {
    let universe = &parts.train_nodes;
    let u = universe.len();
    let total = u * u.saturating_sub(1) / 2;
    let in_universe =
        |v: NodeId| -> bool { universe.binary_search(&v).is_ok() };
    // Source edges with both endpoints eligible; needed for bounds and for
    // the test-side exclusion.
    let edges_in_universe =
        g.edges().filter(|&(i, j)| in_universe(i) && in_universe(j)).count();

    let e_train_sorted = &parts.e_train;
    let e_test_sorted = &parts.e_test;
    let member = |set: &[Pair], p: Pair| set.binary_search(&p).is_ok();

    // Train side: exclude e_train (+ e_test under the strict flag).
    let strict_extra = if cfg.strict_train_nonedges { e_test_sorted.len() } else { 0 };
    let excluded_train = e_train_sorted.len() + strict_extra;
    let avail_train = total.saturating_sub(excluded_train);
    if n_train > avail_train {
        return Err(Error::NonEdgeBudget {
            role: "train",
            requested: n_train,
            available: avail_train,
            universe: u,
            excluded: excluded_train,
        });
    }
    // Test side: conservative bound assuming no overlap between d_train and
    // the edge set.
    let excluded_test = edges_in_universe + n_train;
    let avail_test = total.saturating_sub(excluded_test);
    if n_test > avail_test {
        return Err(Error::NonEdgeBudget {
            role: "test",
            requested: n_test,
            available: avail_test,
            universe: u,
            excluded: excluded_test,
        });
    }

    let train_excludes = |p: Pair| {
        member(e_train_sorted, p)
            || (cfg.strict_train_nonedges && member(e_test_sorted, p))
    };
    let d_train = sample_pairs(
        universe,
        n_train,
        &train_excludes,
        excluded_train,
        seed,
        streams::NON_EDGE_TRAIN,
        streams::NON_EDGE_ENUM_TRAIN,
    );
    let d_train_set: HashSet<Pair> = d_train.iter().copied().collect();
    let test_excludes =
        |p: Pair| g.has_edge(p.0, p.1) || d_train_set.contains(&p);
    let d_test = sample_pairs(
        universe,
        n_test,
        &test_excludes,
        excluded_test,
        seed,
        streams::NON_EDGE_TEST,
        streams::NON_EDGE_ENUM_TEST,
    );
    Ok((d_train, d_test))
}

/// Draw `k` distinct unordered pairs over `universe` avoiding `excluded`.
/// `excluded_upper` is an upper bound on the number of excluded pairs, used
/// to pick the strategy. Exclusion membership is expressed over *universe
/// ids mapped back to source ids* (the caller's closures expect source ids).
fn sample_pairs(
    universe: &[NodeId],
    k: usize,
    excluded: &dyn Fn(Pair) -> bool,
    excluded_upper: usize,
    seed: u64,
    stream: u64,
    enum_stream: u64,
) -> Vec<Pair> {
    let u = universe.len();
    let total = u * u.saturating_sub(1) / 2;
    debug_assert!(k <= total.saturating_sub(excluded_upper));
    let dense = total == 0 || (excluded_upper + k) as f64 / total as f64 > 0.5;
    if !dense {
        if let Some(found) = rejection_sample(universe, k, excluded, seed, stream) {
            return found;
        }
    }
    // Dense regime (or pathological rejection): enumerate eligible pairs and
    // take a uniform subset via partial shuffle.
    let mut eligible: Vec<Pair> = Vec::with_capacity(total.saturating_sub(excluded_upper));
    for (ai, &a) in universe.iter().enumerate() {
        for &b in &universe[ai + 1..] {
            let p = canonical(a, b);
            if !excluded(p) {
                eligible.push(p);
            }
        }
    }
    let mut rng = stage_rng(seed, enum_stream);
    let (picked, _) = eligible.partial_shuffle(&mut rng, k);
    let mut out = picked.to_vec();
    out.sort_unstable();
    out
}

fn rejection_sample(
    universe: &[NodeId],
    k: usize,
    excluded: &dyn Fn(Pair) -> bool,
    seed: u64,
    stream: u64,
) -> Option<Vec<Pair>> {
    let u = universe.len();
    let mut rng = stage_rng(seed, stream);
    let mut drawn: HashSet<Pair> = HashSet::with_capacity(k);
    let mut out: Vec<Pair> = Vec::with_capacity(k);
    // With exclusion density <= 0.5 the expected attempts per draw are < 3;
    // the cap only trips in adversarial cases, falling back to enumeration.
    let max_attempts = 100 * k + 1000;
    let mut attempts = 0;
    while out.len() < k {
        if attempts >= max_attempts {
            return None;
        }
        attempts += 1;
        let a = universe[rng.gen_range(0..u)];
        let b = universe[rng.gen_range(0..u)];
        if a == b {
            continue;
        }
        let p = canonical(a, b);
        if excluded(p) || !drawn.insert(p) {
            continue;
        }
        out.push(p);
    }
    out.sort_unstable();
    Some(out)
}

/// Split edges and sample matching non-edges (`|d_train| = |e_train|`,
/// `|d_test| = |e_test|`) in one step.
pub fn make_split(
    g: &Graph,
    strategy: SplitStrategy,
    f: f64,
    seed: u64,
    cfg: &SplitConfig,
) -> Result<EdgeSplit> {
    let parts = split_edges(g, strategy, f, seed)?;
    assemble(g, strategy, f, seed, cfg, parts)
}

/// Timestamped variant of [`make_split`]. The edge split itself is
/// deterministic; the seed drives non-edge sampling only.
pub fn make_split_timestamped(
    tg: &TimestampedEdgeList,
    f: f64,
    seed: u64,
    cfg: &SplitConfig,
) -> Result<EdgeSplit> {
    let parts = split_timestamp(tg, f)?;
    let g = tg.static_graph();
    assemble(&g, SplitStrategy::Timestamp, f, seed, cfg, parts)
}

fn assemble(
    g: &Graph,
    strategy: SplitStrategy,
    f: f64,
    seed: u64,
    cfg: &SplitConfig,
    parts: SplitParts,
) -> Result<EdgeSplit> {
    let (d_train, d_test) =
        sample_non_edges(g, &parts, parts.e_train.len(), parts.e_test.len(), seed, cfg)?;
    Ok(EdgeSplit {
        strategy,
        f,
        seed,
        e_train: parts.e_train,
        e_test: parts.e_test,
        d_train,
        d_test,
        train_graph: parts.train_graph,
        train_nodes: parts.train_nodes,
        actual_f: parts.actual_f,
        shortfall: parts.shortfall,
        train_timestamps: parts.train_timestamps,
    })
}

/// Inner split for hyperparameter/operator tuning: re-split the outer train
/// graph with the *same strategy* at `f = 0.9`, sampling inner non-edges
/// relative to the train graph only. All ids are train-graph ids.
pub fn validation_split(outer: &EdgeSplit, seed: u64, cfg: &SplitConfig) -> Result<EdgeSplit> {
    let inner_seed = seed ^ VALIDATION_SALT;
    match outer.strategy {
        SplitStrategy::Timestamp => {
            let stamps = outer.train_timestamps.as_ref().ok_or_else(|| Error::Config {
                line: None,
                msg: "timestamp validation split needs train timestamps (not available \
                      for splits loaded from disk)"
                    .into(),
            })?;
            // Train-graph ids equal source ids here (timestamp keeps all
            // nodes), but map defensively through the split.
            let mapped: Vec<(NodeId, NodeId, i64)> = stamps
                .iter()
                .map(|&(i, j, t)| {
                    let (a, b) = outer
                        .to_train_pair((i, j))
                        .expect("train edge endpoints are train nodes");
                    (a, b, t)
                })
                .collect();
            let tg = TimestampedEdgeList::from_edges(outer.train_graph.n(), mapped)?;
            make_split_timestamped(&tg, VALIDATION_TRAIN_F, inner_seed, cfg)
        }
        strategy => make_split(&outer.train_graph, strategy, VALIDATION_TRAIN_F, inner_seed, cfg),
    }
}

const SPLIT_FILES: [(&str, SplitSet); 4] = [
    ("train_edges.txt", SplitSet::ETrain),
    ("test_edges.txt", SplitSet::ETest),
    ("train_nonedges.txt", SplitSet::DTrain),
    ("test_nonedges.txt", SplitSet::DTest),
];

#[derive(Clone, Copy)]
enum SplitSet {
    ETrain,
    ETest,
    DTrain,
    DTest,
}

/// Persist a split: one `i j` pair per line (source internal ids) in four
/// plain-text files plus a `manifest.txt` of `key = value` lines.
pub fn save_split(split: &EdgeSplit, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let pick = |s: SplitSet| match s {
        SplitSet::ETrain => &split.e_train,
        SplitSet::ETest => &split.e_test,
        SplitSet::DTrain => &split.d_train,
        SplitSet::DTest => &split.d_test,
    };
    for (name, set) in SPLIT_FILES {
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        for (i, j) in pick(set) {
            writeln!(w, "{i} {j}")?;
        }
        w.flush()?;
    }
    let mut w = BufWriter::new(File::create(dir.join("manifest.txt"))?);
    writeln!(w, "strategy = {}", split.strategy)?;
    writeln!(w, "f = {}", split.f)?;
    writeln!(w, "actual_f = {}", split.actual_f)?;
    writeln!(w, "seed = {}", split.seed)?;
    writeln!(w, "shortfall = {}", split.shortfall)?;
    writeln!(w, "train_nodes = {}", split.train_nodes.len())?;
    writeln!(w, "train_edges = {}", split.e_train.len())?;
    writeln!(w, "test_edges = {}", split.e_test.len())?;
    writeln!(w, "train_nonedges = {}", split.d_train.len())?;
    writeln!(w, "test_nonedges = {}", split.d_test.len())?;
    w.flush()?;
    Ok(())
}

/// Load a split saved by [`save_split`], rebuilding the train graph against
/// the source graph `g` and validating counts and set relations.
pub fn load_split(dir: &Path, g: &Graph) -> Result<EdgeSplit> {
    let manifest = read_manifest(&dir.join("manifest.txt"))?;
    let mut sets: Vec<Vec<Pair>> = Vec::with_capacity(4);
    for (name, _) in SPLIT_FILES {
        let path = dir.join(name);
        if !path.exists() {
            return Err(Error::SplitFileMissing(dir.to_path_buf(), name.to_string()));
        }
        sets.push(read_pairs(&path)?);
    }
    let [e_train, e_test, d_train, d_test]: [Vec<Pair>; 4] =
        sets.try_into().expect("four files");
    for (key, set) in [
        ("train_edges", &e_train),
        ("test_edges", &e_test),
        ("train_nonedges", &d_train),
        ("test_nonedges", &d_test),
    ] {
        let expect = manifest.get_count(key)?;
        if set.len() != expect {
            return Err(Error::Config {
                line: None,
                msg: format!("{key}: manifest says {expect} pairs, file has {}", set.len()),
            });
        }
    }
    for &(i, j) in e_train.iter().chain(e_test.iter()) {
        if !g.has_edge(i, j) {
            return Err(Error::Config {
                line: None,
                msg: format!("({i}, {j}) recorded as an edge but absent from the source graph"),
            });
        }
    }
    for &(i, j) in &d_test {
        if g.has_edge(i, j) {
            return Err(Error::Config {
                line: None,
                msg: format!("test non-edge ({i}, {j}) is an edge of the source graph"),
            });
        }
    }
    let mut train_nodes: Vec<NodeId> =
        e_train.iter().flat_map(|&(i, j)| [i, j]).collect();
    train_nodes.sort_unstable();
    train_nodes.dedup();
    let train_graph = Graph::from_parent_edges(g, &train_nodes, &e_train);
    let expect_nodes = manifest.get_count("train_nodes")?;
    if train_nodes.len() != expect_nodes {
        return Err(Error::Config {
            line: None,
            msg: format!(
                "manifest says {expect_nodes} train nodes, edges cover {}",
                train_nodes.len()
            ),
        });
    }
    Ok(EdgeSplit {
        strategy: manifest.strategy,
        f: manifest.f,
        seed: manifest.seed,
        e_train,
        e_test,
        d_train,
        d_test,
        train_graph,
        train_nodes,
        actual_f: manifest.actual_f,
        shortfall: manifest.shortfall,
        train_timestamps: None,
    })
}

struct Manifest {
    strategy: SplitStrategy,
    f: f64,
    actual_f: f64,
    seed: u64,
    shortfall: bool,
    counts: std::collections::HashMap<String, usize>,
}

impl Manifest {
    fn get_count(&self, key: &str) -> Result<usize> {
        self.counts.get(key).copied().ok_or_else(|| Error::Config {
            line: None,
            msg: format!("manifest missing key {key}"),
        })
    }
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    if !path.exists() {
        return Err(Error::SplitFileMissing(
            path.parent().unwrap_or(Path::new("")).to_path_buf(),
            "manifest.txt".into(),
        ));
    }
    let mut strategy = None;
    let mut f = None;
    let mut actual_f = None;
    let mut seed = None;
    let mut shortfall = None;
    let mut counts = std::collections::HashMap::new();
    for (idx, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected 'key = value', found {trimmed:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse {
            line: line_no,
            msg: format!("invalid {what}: {value:?}"),
        };
        match key {
            "strategy" => {
                strategy = Some(value.parse().map_err(|_| bad("strategy"))?);
            }
            "f" => f = Some(value.parse().map_err(|_| bad("f"))?),
            "actual_f" => actual_f = Some(value.parse().map_err(|_| bad("actual_f"))?),
            "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "shortfall" => shortfall = Some(value.parse().map_err(|_| bad("shortfall"))?),
            _ => {
                let n = value.parse().map_err(|_| bad("count"))?;
                counts.insert(key.to_string(), n);
            }
        }
    }
    let missing = |what: &str| Error::Config {
        line: None,
        msg: format!("manifest missing key {what}"),
    };
    Ok(Manifest {
        strategy: strategy.ok_or_else(|| missing("strategy"))?,
        f: f.ok_or_else(|| missing("f"))?,
        actual_f: actual_f.ok_or_else(|| missing("actual_f"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
        shortfall: shortfall.ok_or_else(|| missing("shortfall"))?,
        counts,
    })
}

fn read_pairs(path: &Path) -> Result<Vec<Pair>> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                line: line_no,
                msg: format!("expected 'i j', found {line:?}"),
            })
        };
        let i = parse(it.next())?;
        let j = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 'i j', found {line:?}"),
            });
        }
        out.push(canonical(i, j));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn fraction_bounds_rejected() {
        let g = gen::cycle(4);
        for f in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(
                split_edges(&g, SplitStrategy::St, f, 1),
                Err(Error::TrainFraction { .. })
            ));
        }
    }

    #[test]
    fn st_below_tree_bound_is_an_error() {
        // C4: n=4, m=4, spanning tree needs 3 edges; f=0.5 keeps only 2.
        let g = gen::cycle(4);
        let err = split_edges(&g, SplitStrategy::St, 0.5, 1).unwrap_err();
        match err {
            Error::TrainFractionBelowTree { target, tree, min_f, .. } => {
                assert_eq!(target, 2);
                assert_eq!(tree, 3);
                assert!((min_f - 0.75).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triangle_st_forced_sizes() {
        // Triangle, f = 2/3: train = spanning tree (2 edges), test = 1 edge.
        let g = gen::complete(3);
        let parts = split_edges(&g, SplitStrategy::St, 2.0 / 3.0, 5).unwrap();
        assert_eq!(parts.e_train.len(), 2);
        assert_eq!(parts.e_test.len(), 1);
        assert!(parts.train_graph.is_connected());
    }

    #[test]
    fn triangle_non_edges_infeasible() {
        let g = gen::complete(3);
        let parts = split_edges(&g, SplitStrategy::St, 2.0 / 3.0, 5).unwrap();
        let err = sample_non_edges(&g, &parts, parts.e_train.len(), parts.e_test.len(), 1,
            &SplitConfig::default())
        .unwrap_err();
        assert!(matches!(err, Error::NonEdgeBudget { role: "train", available: 1, .. }));
    }

    #[test]
    fn p3_unique_non_edge() {
        // Path 0-1-2: the only candidate non-edge is {0, 2}.
        let g = gen::path_graph(3);
        let parts = SplitParts {
            e_train: g.edges().collect(),
            e_test: vec![],
            train_graph: g.clone(),
            train_nodes: vec![0, 1, 2],
            actual_f: 1.0,
            shortfall: false,
            train_timestamps: None,
        };
        let (d_train, d_test) =
            sample_non_edges(&g, &parts, 1, 0, 9, &SplitConfig::default()).unwrap();
        assert_eq!(d_train, vec![(0, 2)]);
        assert!(d_test.is_empty());
    }

    #[test]
    fn disconnected_input_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            split_edges(&g, SplitStrategy::Random, 0.8, 1),
            Err(Error::Disconnected { components: 2 })
        ));
        assert!(matches!(wilson_ust(&g, 1), Err(Error::Disconnected { .. })));
        assert!(matches!(dfs_tree(&g), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn p3_ust_is_the_unique_tree() {
        let g = gen::path_graph(3);
        for seed in 0..20 {
            assert_eq!(wilson_ust(&g, seed).unwrap(), vec![(0, 1), (1, 2)]);
        }
    }

    #[test]
    fn dfs_tree_is_deterministic_and_spanning() {
        let g = gen::cycle(5);
        let t1 = dfs_tree(&g).unwrap();
        let t2 = dfs_tree(&g).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.len(), 4);
        // Ascending neighbor order from node 0 walks 0-1-2-3-4.
        assert_eq!(t1, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn timestamp_shortfall_warns_not_errors() {
        // P3 with timestamps: both edges are bridges, no edge can be removed.
        let tg = TimestampedEdgeList::from_edges(3, [(0, 1, 10), (1, 2, 20)]).unwrap();
        let parts = split_timestamp(&tg, 0.5).unwrap();
        assert!(parts.shortfall);
        assert!(parts.e_test.is_empty());
        assert_eq!(parts.e_train.len(), 2);
        assert_eq!(parts.actual_f, 1.0);
    }

    #[test]
    fn timestamp_takes_newest_removable() {
        // C4 with distinct timestamps; newest edge is removable (cycle).
        let tg = TimestampedEdgeList::from_edges(
            4,
            [(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 3, 4)],
        )
        .unwrap();
        let parts = split_timestamp(&tg, 0.75).unwrap();
        assert_eq!(parts.e_test, vec![(0, 3)]);
        assert_eq!(parts.e_train.len(), 3);
        assert!(!parts.shortfall);
        assert!(parts.train_graph.is_connected());
    }

    #[test]
    fn manifest_roundtrip() {
        let g = gen::random_connected(30, 30, 3);
        let split = make_split(&g, SplitStrategy::St, 0.8, 11, &SplitConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_split(&split, dir.path()).unwrap();
        let loaded = load_split(dir.path(), &g).unwrap();
        assert_eq!(loaded.e_train, split.e_train);
        assert_eq!(loaded.e_test, split.e_test);
        assert_eq!(loaded.d_train, split.d_train);
        assert_eq!(loaded.d_test, split.d_test);
        assert_eq!(loaded.train_nodes, split.train_nodes);
        assert_eq!(loaded.seed, split.seed);
    }
}
