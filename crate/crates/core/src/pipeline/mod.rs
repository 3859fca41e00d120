//! Evaluation orchestration: split, embed/score, tune, classify, record.
//!
//! An [`EvalTask`] names one (dataset, method, setup, d, f, strategy)
//! combination. Each repeat re-splits with seed = base seed + repeat index,
//! then either scores test pairs directly (heuristics) or runs the embedding
//! protocol: in setup LP1 every grid candidate trains on an inner 90% split
//! and is scored on validation pairs with all four node-pair operators; in
//! LP2 the method keeps its defaults but the operator is still tuned. The
//! winner retrains on the full train graph, a classifier is fit on train
//! pairs, and test pairs are scored with AUC-ROC.
//!
//! No feature computation ever sees a test edge: every embedding and
//! heuristic call receives only the train graph, and [`guard_leakage`]
//! re-checks that invariant right before each stage.

pub mod store;

pub use store::{ResultsStore, RowKey, StoredRow, CSV_HEADER};

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::embed::line::LineOrder;
use crate::embed::{external, gf, le, line, sgns, walks, Embedding};
use crate::graph::{Graph, Pair, TimestampedEdgeList};
use crate::heuristics::{self, HeuristicKind};
use crate::metrics;
use crate::predict::{
    apply_operator, dt_fit, lr_fit, lrcv_fit, Model, PairOperator, Standardizer,
};
use crate::split::{self, EdgeSplit, SplitConfig, SplitStrategy};
use crate::{Error, Result};

pub const DEFAULT_DIM: usize = 128;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_REPEATS: usize = 3;
pub const DEFAULT_BASE_SEED: u64 = 42;
pub const DEFAULT_EXTERNAL_TIMEOUT_SECS: u64 = 3600;

/// Experimental setup: LP1 tunes hyperparameters and the node-pair operator
/// on an inner validation split; LP2 keeps method defaults and tunes only the
/// operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setup {
    Lp1,
    Lp2,
}

impl Setup {
    pub fn as_str(&self) -> &'static str {
        match self {
            Setup::Lp1 => "LP1",
            Setup::Lp2 => "LP2",
        }
    }
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Setup> {
        match s.to_ascii_lowercase().as_str() {
            "lp1" => Ok(Setup::Lp1),
            "lp2" => Ok(Setup::Lp2),
            other => Err(Error::Config {
                line: None,
                msg: format!("unknown setup {other:?} (expected LP1 or LP2)"),
            }),
        }
    }
}

/// Binary classifier applied to node-pair features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    /// Logistic regression with a fixed L2 penalty.
    Lr,
    /// Logistic regression with the penalty chosen by stratified k-fold CV.
    Lrcv,
    /// CART decision tree.
    Dt,
}

impl ClassifierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::Lr => "LR",
            ClassifierKind::Lrcv => "LRCV",
            ClassifierKind::Dt => "DT",
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClassifierKind> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ClassifierKind::Lr),
            "lrcv" => Ok(ClassifierKind::Lrcv),
            "dt" => Ok(ClassifierKind::Dt),
            other => Err(Error::Config {
                line: None,
                msg: format!("unknown classifier {other:?} (expected LR, LRCV, or DT)"),
            }),
        }
    }
}

/// Classifier hyperparameters shared by every stage that fits a model.
#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    /// Penalty for plain LR.
    pub lambda: f64,
    /// Penalty grid for LRCV.
    pub lambda_grid: Vec<f64>,
    /// Folds for LRCV.
    pub folds: usize,
    pub tol: f64,
    pub max_iters: usize,
    /// Depth cap for DT.
    pub max_depth: usize,
    /// Minimum rows per DT leaf.
    pub min_leaf: usize,
}

impl Default for ClassifierConfig {
    fn default() -> ClassifierConfig {
        ClassifierConfig {
            kind: ClassifierKind::Lrcv,
            lambda: 1e-4,
            lambda_grid: vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3],
            folds: 5,
            tol: 1e-4,
            max_iters: 2000,
            max_depth: 10,
            min_leaf: 5,
        }
    }
}

/// One fully specified method candidate: a heuristic, a native embedding
/// method with concrete hyperparameters, or an external command template.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Heuristic(HeuristicKind),
    /// All five neighbourhood heuristics stacked as a 5-dimensional feature
    /// vector, z-scored, and fed to the classifier.
    NeHeuristics,
    Gf {
        lambda: f64,
        learn_rate: f64,
        epochs: usize,
    },
    Le,
    Node2vec {
        num_walks: usize,
        walk_len: usize,
        window: usize,
        p: f64,
        q: f64,
        negatives: usize,
        learn_rate: f64,
        epochs: usize,
    },
    Line {
        order: LineOrder,
        rho: f64,
        negative_ratio: usize,
        /// Edge-sample budget as a multiple of the train edge count.
        budget_per_edge: usize,
    },
    External {
        /// Shell command with `{input}`, `{output}`, `{dim}` placeholders.
        command: String,
        timeout_secs: u64,
    },
}

impl MethodSpec {
    pub fn gf_default() -> MethodSpec {
        MethodSpec::Gf {
            lambda: gf::DEFAULT_LAMBDA,
            learn_rate: gf::DEFAULT_LEARN_RATE,
            epochs: gf::DEFAULT_EPOCHS,
        }
    }

    pub fn node2vec_default() -> MethodSpec {
        MethodSpec::Node2vec {
            num_walks: walks::DEFAULT_NUM_WALKS,
            walk_len: walks::DEFAULT_WALK_LEN,
            window: sgns::DEFAULT_WINDOW,
            p: walks::DEFAULT_P,
            q: walks::DEFAULT_Q,
            negatives: sgns::DEFAULT_NEGATIVES,
            learn_rate: sgns::DEFAULT_LEARN_RATE,
            epochs: sgns::DEFAULT_EPOCHS,
        }
    }

    pub fn line_default() -> MethodSpec {
        MethodSpec::Line {
            order: LineOrder::Joint,
            rho: line::DEFAULT_RHO,
            negative_ratio: line::DEFAULT_NEGATIVE_RATIO,
            budget_per_edge: line::DEFAULT_BUDGET_PER_EDGE,
        }
    }

    /// Short family label used in logs and reports.
    pub fn family(&self) -> &'static str {
        match self {
            MethodSpec::Heuristic(_) => "heuristic",
            MethodSpec::NeHeuristics => "ne_heuristics",
            MethodSpec::Gf { .. } => "gf",
            MethodSpec::Le => "le",
            MethodSpec::Node2vec { .. } => "node2vec",
            MethodSpec::Line { .. } => "line",
            MethodSpec::External { .. } => "external",
        }
    }

    /// True if the method produces an embedding that node-pair operators and
    /// a classifier consume.
    pub fn is_embedding(&self) -> bool {
        !matches!(self, MethodSpec::Heuristic(_) | MethodSpec::NeHeuristics)
    }

    /// True if any classifier is fit for this method.
    pub fn uses_classifier(&self) -> bool {
        !matches!(self, MethodSpec::Heuristic(_))
    }

    /// Deterministic hyperparameter description recorded in results rows;
    /// `"-"` for parameter-free methods.
    pub fn hyperparams(&self) -> String {
        match self {
            MethodSpec::Heuristic(_)
            | MethodSpec::NeHeuristics
            | MethodSpec::Le
            | MethodSpec::External { .. } => "-".into(),
            MethodSpec::Gf { lambda, learn_rate, epochs } => {
                format!("lambda={lambda} lr={learn_rate} epochs={epochs}")
            }
            MethodSpec::Node2vec { num_walks, walk_len, window, p, q, negatives, learn_rate, epochs } => {
                format!(
                    "num_walks={num_walks} walk_len={walk_len} window={window} p={p} q={q} \
                     negatives={negatives} lr={learn_rate} epochs={epochs}"
                )
            }
            MethodSpec::Line { order, rho, negative_ratio, budget_per_edge } => {
                format!(
                    "order={} rho={rho} negative_ratio={negative_ratio} \
                     budget_per_edge={budget_per_edge}",
                    order.as_str()
                )
            }
        }
    }

    /// The standard grid searched in setup LP1 when the experiment config
    /// does not override it. Node2vec sweeps walk shape, window, and p=q with
    /// walk count tied to walk length; LINE sweeps the learning rate and the
    /// negative-sample ratio. Fields not swept are inherited from `self`.
    /// Methods without a standard grid return an empty vector and run with
    /// their defaults.
    pub fn default_grid(&self) -> Vec<MethodSpec> {
        match *self {
            MethodSpec::Node2vec { negatives, learn_rate, epochs, .. } => {
                let mut grid = Vec::with_capacity(45);
                for &w in &[5usize, 10, 20, 40, 80] {
                    for &window in &[5usize, 10, 20] {
                        for &pq in &[0.5, 1.0, 2.0] {
                            grid.push(MethodSpec::Node2vec {
                                num_walks: w,
                                walk_len: w,
                                window,
                                p: pq,
                                q: pq,
                                negatives,
                                learn_rate,
                                epochs,
                            });
                        }
                    }
                }
                grid
            }
            MethodSpec::Line { order, budget_per_edge, .. } => {
                let mut grid = Vec::with_capacity(4);
                for &rho in &[0.01, 0.025] {
                    for &negative_ratio in &[5usize, 10] {
                        grid.push(MethodSpec::Line { order, rho, negative_ratio, budget_per_edge });
                    }
                }
                grid
            }
            _ => Vec::new(),
        }
    }
}

/// A named method plus the hyperparameter grid LP1 searches for it.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub name: String,
    /// Default (LP2) parameter point; also the fallback when the grid is
    /// empty.
    pub spec: MethodSpec,
    /// LP1 candidates in search order. Empty means "no grid": LP1 evaluates
    /// just the default point (the operator is still tuned).
    pub grid: Vec<MethodSpec>,
}

impl MethodConfig {
    /// A method with no hyperparameter grid.
    pub fn new(name: impl Into<String>, spec: MethodSpec) -> MethodConfig {
        MethodConfig { name: name.into(), spec, grid: Vec::new() }
    }

    /// A method carrying the standard grid for its family.
    pub fn with_default_grid(name: impl Into<String>, spec: MethodSpec) -> MethodConfig {
        let grid = spec.default_grid();
        MethodConfig { name: name.into(), spec, grid }
    }

    /// Candidates evaluated during tuning, in tie-breaking order.
    pub fn candidates(&self, setup: Setup) -> Vec<&MethodSpec> {
        match setup {
            Setup::Lp2 => vec![&self.spec],
            Setup::Lp1 if self.grid.is_empty() => vec![&self.spec],
            Setup::Lp1 => self.grid.iter().collect(),
        }
    }
}

/// A dataset on disk.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    /// Third column holds a timestamp; enables the timestamp split strategy.
    pub timestamped: bool,
}

/// A dataset loaded into memory, before preprocessing.
#[derive(Debug, Clone)]
pub enum LoadedData {
    Static(Graph),
    Temporal(TimestampedEdgeList),
}

impl DatasetSpec {
    pub fn load(&self) -> Result<LoadedData> {
        if !self.path.exists() {
            return Err(Error::MissingPath(self.path.clone()));
        }
        if self.timestamped {
            Ok(LoadedData::Temporal(TimestampedEdgeList::load_path(&self.path)?))
        } else {
            Ok(LoadedData::Static(Graph::load_edge_list_path(&self.path)?))
        }
    }
}

/// A dataset restricted to its main connected component, in the form the
/// split stage consumes.
#[derive(Debug, Clone)]
pub enum PreparedData {
    Static(Graph),
    Temporal(TimestampedEdgeList),
}

/// Restrict to the main connected component and pick the representation the
/// strategy needs. Timestamps are only kept when the timestamp strategy will
/// use them; that strategy on a static dataset is a configuration error.
pub fn prepare(data: &LoadedData, strategy: SplitStrategy) -> Result<PreparedData> {
    match data {
        LoadedData::Static(_) if strategy == SplitStrategy::Timestamp => Err(Error::Config {
            line: None,
            msg: "timestamp split strategy requires a timestamped dataset".into(),
        }),
        LoadedData::Static(g) => Ok(PreparedData::Static(g.main_component().0)),
        LoadedData::Temporal(ts) => {
            let (main, nodes) = ts.static_graph().main_component();
            if strategy == SplitStrategy::Timestamp {
                Ok(PreparedData::Temporal(ts.restrict(&nodes)))
            } else {
                Ok(PreparedData::Static(main))
            }
        }
    }
}

/// One evaluation job: a dataset, a method, and every protocol knob.
#[derive(Debug, Clone)]
pub struct EvalTask {
    pub dataset: DatasetSpec,
    pub method: MethodConfig,
    pub setup: Setup,
    pub d: usize,
    pub f: f64,
    pub strategy: SplitStrategy,
    pub repeats: usize,
    pub base_seed: u64,
    pub classifier: ClassifierConfig,
    pub split_cfg: SplitConfig,
}

impl EvalTask {
    pub fn new(dataset: DatasetSpec, method: MethodConfig) -> EvalTask {
        EvalTask {
            dataset,
            method,
            setup: Setup::Lp2,
            d: DEFAULT_DIM,
            f: DEFAULT_TRAIN_FRACTION,
            strategy: SplitStrategy::St,
            repeats: DEFAULT_REPEATS,
            base_seed: DEFAULT_BASE_SEED,
            classifier: ClassifierConfig::default(),
            split_cfg: SplitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(Error::Config { line: None, msg: "repeats must be at least 1".into() });
        }
        if self.d < 1 {
            return Err(Error::Config { line: None, msg: "d must be at least 1".into() });
        }
        if !(self.f > 0.0 && self.f < 1.0) {
            return Err(Error::TrainFraction { f: self.f });
        }
        if self.strategy == SplitStrategy::Timestamp && !self.dataset.timestamped {
            return Err(Error::Config {
                line: None,
                msg: format!(
                    "dataset {:?} is not timestamped; timestamp split unavailable",
                    self.dataset.name
                ),
            });
        }
        let odd_joint = |spec: &MethodSpec| {
            matches!(spec, MethodSpec::Line { order: LineOrder::Joint, .. }) && self.d % 2 != 0
        };
        if odd_joint(&self.method.spec) || self.method.grid.iter().any(odd_joint) {
            return Err(Error::Config {
                line: None,
                msg: format!("joint LINE needs an even dimensionality, got d={}", self.d),
            });
        }
        Ok(())
    }

    /// Human-readable identity used in logs and stage-annotated errors.
    pub fn id(&self) -> String {
        format!(
            "{}/{} {} {} d={} f={}",
            self.dataset.name,
            self.method.name,
            self.setup.as_str(),
            self.strategy.as_str(),
            self.d,
            self.f
        )
    }

    /// Classifier column value: the classifier kind, or `"-"` for methods
    /// that never fit one.
    pub fn classifier_label(&self) -> &'static str {
        if self.method.spec.uses_classifier() {
            self.classifier.kind.as_str()
        } else {
            "-"
        }
    }

    /// Store key identifying one repeat of this task.
    pub fn row_key(&self, repeat: usize) -> RowKey {
        (
            self.dataset.name.clone(),
            self.method.name.clone(),
            self.setup.as_str().to_string(),
            self.strategy.as_str().to_string(),
            self.d,
            self.f.to_bits(),
            self.classifier_label().to_string(),
            repeat,
        )
    }
}

/// Aggregate over the repeats of one task.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub task_id: String,
    pub repeats: usize,
    /// Rows for the repeats that completed, in repeat order.
    pub rows: Vec<StoredRow>,
    /// (repeat index, error message) for repeats that failed.
    pub failures: Vec<(usize, String)>,
    /// Mean test AUC over completed repeats; NaN if none completed.
    pub mean_auc: f64,
    /// Population standard deviation over completed repeats; 0 below two.
    pub std_auc: f64,
}

impl ResultRecord {
    fn new(
        task: &EvalTask,
        rows: Vec<StoredRow>,
        failures: Vec<(usize, String)>,
    ) -> ResultRecord {
        let aucs: Vec<f64> = rows.iter().map(|r| r.test_auc).collect();
        let mean_auc = if aucs.is_empty() {
            f64::NAN
        } else {
            aucs.iter().sum::<f64>() / aucs.len() as f64
        };
        let std_auc = if aucs.len() >= 2 {
            (aucs.iter().map(|a| (a - mean_auc).powi(2)).sum::<f64>() / aucs.len() as f64).sqrt()
        } else {
            0.0
        };
        ResultRecord { task_id: task.id(), repeats: task.repeats, rows, failures, mean_auc, std_auc }
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty() && self.rows.len() == self.repeats
    }
}

/// Assert that no held-out test edge is present in the train graph. Called
/// immediately before every embedding or heuristic computation.
pub fn guard_leakage(split: &EdgeSplit) -> Result<()> {
    let overlap = split
        .e_test
        .iter()
        .filter(|&&p| {
            split.to_train_pair(p).is_some_and(|(a, b)| split.train_graph.has_edge(a, b))
        })
        .count();
    if overlap > 0 {
        return Err(Error::Leakage { overlap });
    }
    Ok(())
}

/// Train one embedding on `g` (always a train graph). The per-edge LINE
/// budget is resolved against this graph's edge count; external commands run
/// in a fresh temporary directory.
pub fn embed_with(spec: &MethodSpec, g: &Graph, d: usize, seed: u64) -> Result<Embedding> {
    match spec {
        MethodSpec::Heuristic(_) | MethodSpec::NeHeuristics => Err(Error::Config {
            line: None,
            msg: format!("method family {:?} has no embedding stage", spec.family()),
        }),
        MethodSpec::Gf { lambda, learn_rate, epochs } => {
            gf::embed_gf(g, d, *lambda, *learn_rate, *epochs, seed)
        }
        MethodSpec::Le => le::embed_le(g, d),
        MethodSpec::Node2vec { num_walks, walk_len, window, p, q, negatives, learn_rate, epochs } => {
            let corpus = walks::generate_walks(g, *num_walks, *walk_len, *p, *q, seed);
            sgns::train_sgns(&corpus, g.n(), d, *window, *negatives, *learn_rate, *epochs, seed)
        }
        MethodSpec::Line { order, rho, negative_ratio, budget_per_edge } => {
            let budget = budget_per_edge.saturating_mul(g.edge_count());
            line::embed_line(g, d, *order, *rho, *negative_ratio, budget, seed)
        }
        MethodSpec::External { command, timeout_secs } => {
            let workdir = tempfile::tempdir()?;
            external::run_external_method(
                command,
                g,
                d,
                workdir.path(),
                Duration::from_secs(*timeout_secs),
            )
        }
    }
}

fn fit_classifier(
    cfg: &ClassifierConfig,
    x: &crate::predict::Features,
    y: &[bool],
    seed: u64,
) -> Result<Model> {
    match cfg.kind {
        ClassifierKind::Lr => Ok(Model::Linear(lr_fit(x, y, cfg.lambda, cfg.tol, cfg.max_iters)?)),
        ClassifierKind::Lrcv => Ok(Model::Linear(lrcv_fit(
            x,
            y,
            &cfg.lambda_grid,
            cfg.folds,
            cfg.tol,
            cfg.max_iters,
            seed,
        )?)),
        ClassifierKind::Dt => Ok(Model::Tree(dt_fit(x, y, cfg.max_depth, cfg.min_leaf)?)),
    }
}

fn concat_pairs(pos: &[Pair], neg: &[Pair]) -> (Vec<Pair>, Vec<bool>) {
    let mut pairs = Vec::with_capacity(pos.len() + neg.len());
    pairs.extend_from_slice(pos);
    pairs.extend_from_slice(neg);
    let mut labels = vec![true; pos.len()];
    labels.extend(std::iter::repeat(false).take(neg.len()));
    (pairs, labels)
}

/// Test positives in train-graph ids. Random splits may strand a test
/// endpoint outside the train graph; such pairs cannot be scored by any
/// method and are dropped from the ranking task.
fn mappable_test_pairs(split: &EdgeSplit) -> Vec<Pair> {
    split.e_test.iter().filter_map(|&p| split.to_train_pair(p)).collect()
}

/// What one repeat produced beyond its timings.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub operator: Option<PairOperator>,
    pub hyperparams: String,
    pub val_auc: Option<f64>,
    pub test_auc: f64,
    pub embed_s: f64,
    pub tune_s: f64,
    pub predict_s: f64,
}

/// Pick the best (hyperparameter candidate, operator) pair on an inner
/// validation split of `outer`'s train graph. Candidates are scanned in grid
/// order and operators in declaration order; only a strictly higher
/// validation AUC replaces the incumbent, so ties resolve to the earliest
/// candidate, then the earliest operator. Individual candidate failures are
/// tolerated; if every combination fails the first cause is reported.
pub fn tune_grid(
    outer: &EdgeSplit,
    candidates: &[&MethodSpec],
    task: &EvalTask,
    seed: u64,
) -> Result<(usize, PairOperator, f64)> {
    assert!(!candidates.is_empty(), "tuning needs at least one candidate");
    let inner = split::validation_split(outer, seed, &task.split_cfg)?;
    guard_leakage(&inner)?;
    let val_pos = mappable_test_pairs(&inner);
    let val_neg = inner.to_train_pairs(&inner.d_test)?;
    let (val_pairs, y_val) = concat_pairs(&val_pos, &val_neg);
    let train_pos = inner.to_train_pairs(&inner.e_train)?;
    let train_neg = inner.to_train_pairs(&inner.d_train)?;
    let (train_pairs, y_train) = concat_pairs(&train_pos, &train_neg);

    let mut best: Option<(f64, usize, PairOperator)> = None;
    let mut first_err: Option<Error> = None;
    for (ci, spec) in candidates.iter().enumerate() {
        let emb = match embed_with(spec, &inner.train_graph, task.d, seed) {
            Ok(emb) => emb,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        for &op in PairOperator::ALL.iter() {
            let attempt = (|| -> Result<f64> {
                let x_train = apply_operator(&emb, &train_pairs, op)?;
                let model = fit_classifier(&task.classifier, &x_train, &y_train, seed)?;
                let x_val = apply_operator(&emb, &val_pairs, op)?;
                let scores = model.predict_proba(&x_val)?;
                metrics::auc_roc(&scores, &y_val)
            })();
            match attempt {
                Ok(auc) => {
                    if best.as_ref().is_none_or(|b| auc > b.0) {
                        best = Some((auc, ci, op));
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
    }
    match best {
        Some((auc, ci, op)) => Ok((ci, op, auc)),
        None => Err(Error::AllCandidatesFailed {
            attempted: candidates.len() * PairOperator::ALL.len(),
            first: Box::new(first_err.expect("no candidates attempted")),
        }),
    }
}

/// Run one repeat's feature/score stages on an already computed split.
pub fn evaluate_on_split(split: &EdgeSplit, task: &EvalTask, seed: u64) -> Result<EvalOutcome> {
    guard_leakage(split)?;
    let test_pos = mappable_test_pairs(split);
    let test_neg = split.to_train_pairs(&split.d_test)?;
    let (test_pairs, y_test) = concat_pairs(&test_pos, &test_neg);

    match &task.method.spec {
        MethodSpec::Heuristic(kind) => {
            let timer = Instant::now();
            let scores = heuristics::heuristic_score(&split.train_graph, &test_pairs, *kind)?;
            let test_auc = metrics::auc_roc(&scores, &y_test)?;
            Ok(EvalOutcome {
                operator: None,
                hyperparams: task.method.spec.hyperparams(),
                val_auc: None,
                test_auc,
                embed_s: 0.0,
                tune_s: 0.0,
                predict_s: timer.elapsed().as_secs_f64(),
            })
        }
        MethodSpec::NeHeuristics => {
            let train_pos = split.to_train_pairs(&split.e_train)?;
            let train_neg = split.to_train_pairs(&split.d_train)?;
            let (train_pairs, y_train) = concat_pairs(&train_pos, &train_neg);
            let timer = Instant::now();
            let x_train_raw = heuristics::ne_heuristics_features(&split.train_graph, &train_pairs)?;
            let embed_s = timer.elapsed().as_secs_f64();
            let timer = Instant::now();
            let scaler = Standardizer::fit(&x_train_raw);
            let x_train = scaler.transform(&x_train_raw);
            let model = fit_classifier(&task.classifier, &x_train, &y_train, seed)?;
            let x_test_raw = heuristics::ne_heuristics_features(&split.train_graph, &test_pairs)?;
            let x_test = scaler.transform(&x_test_raw);
            let scores = model.predict_proba(&x_test)?;
            let test_auc = metrics::auc_roc(&scores, &y_test)?;
            Ok(EvalOutcome {
                operator: None,
                hyperparams: task.method.spec.hyperparams(),
                val_auc: None,
                test_auc,
                embed_s,
                tune_s: 0.0,
                predict_s: timer.elapsed().as_secs_f64(),
            })
        }
        _ => {
            let candidates = task.method.candidates(task.setup);
            let timer = Instant::now();
            let (best_idx, operator, val_auc) = tune_grid(split, &candidates, task, seed)?;
            let tune_s = timer.elapsed().as_secs_f64();
            let winner = candidates[best_idx];

            let timer = Instant::now();
            let emb = embed_with(winner, &split.train_graph, task.d, seed)?;
            let embed_s = timer.elapsed().as_secs_f64();

            let train_pos = split.to_train_pairs(&split.e_train)?;
            let train_neg = split.to_train_pairs(&split.d_train)?;
            let (train_pairs, y_train) = concat_pairs(&train_pos, &train_neg);
            let timer = Instant::now();
            let x_train = apply_operator(&emb, &train_pairs, operator)?;
            let model = fit_classifier(&task.classifier, &x_train, &y_train, seed)?;
            let x_test = apply_operator(&emb, &test_pairs, operator)?;
            let scores = model.predict_proba(&x_test)?;
            let test_auc = metrics::auc_roc(&scores, &y_test)?;
            Ok(EvalOutcome {
                operator: Some(operator),
                hyperparams: winner.hyperparams(),
                val_auc: Some(val_auc),
                test_auc,
                embed_s,
                tune_s,
                predict_s: timer.elapsed().as_secs_f64(),
            })
        }
    }
}

fn evaluate_repeat(prepared: &PreparedData, task: &EvalTask, repeat: usize) -> Result<StoredRow> {
    let seed = task.base_seed + repeat as u64;
    let unit = format!("{} repeat={repeat}", task.id());
    let timer = Instant::now();
    let split = match prepared {
        PreparedData::Static(g) => split::make_split(g, task.strategy, task.f, seed, &task.split_cfg),
        PreparedData::Temporal(ts) => split::make_split_timestamped(ts, task.f, seed, &task.split_cfg),
    }
    .map_err(|e| e.in_stage("split", unit.clone()))?;
    let split_s = timer.elapsed().as_secs_f64();
    let out = evaluate_on_split(&split, task, seed).map_err(|e| e.in_stage("evaluate", unit))?;
    Ok(StoredRow {
        dataset: task.dataset.name.clone(),
        method: task.method.name.clone(),
        setup: task.setup.as_str().to_string(),
        strategy: task.strategy.as_str().to_string(),
        d: task.d,
        f: task.f,
        classifier: task.classifier_label().to_string(),
        repeat,
        operator: out.operator.map_or_else(|| "-".into(), |o| o.as_str().to_string()),
        hyperparams: out.hyperparams,
        val_auc: out.val_auc,
        test_auc: out.test_auc,
        split_s,
        embed_s: out.embed_s,
        tune_s: out.tune_s,
        predict_s: out.predict_s,
        seed,
    })
}

/// Run a single repeat of a task end to end (load, preprocess, split,
/// evaluate) without touching any results store.
pub fn evaluate_method(task: &EvalTask, repeat: usize) -> Result<StoredRow> {
    task.validate()?;
    let data = task.dataset.load()?;
    let prepared = prepare(&data, task.strategy)?;
    evaluate_repeat(&prepared, task, repeat)
}

/// Run every repeat of `task`, skipping repeats already present in the store
/// and appending each newly completed one. Per-repeat failures are collected
/// rather than aborting the task; store I/O failures abort.
pub fn run_experiment(task: &EvalTask, store: &Mutex<ResultsStore>) -> Result<ResultRecord> {
    task.validate()?;
    let data = task.dataset.load()?;
    let prepared = prepare(&data, task.strategy)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for repeat in 0..task.repeats {
        let key = task.row_key(repeat);
        let cached = store.lock().expect("store lock poisoned").get(&key).cloned();
        if let Some(row) = cached {
            rows.push(row);
            continue;
        }
        match evaluate_repeat(&prepared, task, repeat) {
            Ok(row) => {
                store.lock().expect("store lock poisoned").append(row.clone())?;
                rows.push(row);
            }
            Err(e) => failures.push((repeat, e.to_string())),
        }
    }
    Ok(ResultRecord::new(task, rows, failures))
}

/// Run many tasks on a thread pool of `jobs` workers, sharing one results
/// store. `on_done` fires after each task with a running completion count.
/// Output order matches task order. With `jobs = 1` execution is strictly
/// sequential in task order, so the store files are byte-deterministic.
pub fn run_all<F>(
    tasks: &[EvalTask],
    store: &Mutex<ResultsStore>,
    jobs: usize,
    on_done: F,
) -> Vec<Result<ResultRecord>>
where
    F: Fn(usize, &EvalTask, &Result<ResultRecord>) + Sync,
{
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    assert!(jobs >= 1, "need at least one worker");
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool creation");
    let done = AtomicUsize::new(0);
    pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                let record = run_experiment(task, store);
                let finished = done.fetch_add(1, Ordering::SeqCst) + 1;
                on_done(finished, task, &record);
                record
            })
            .collect()
    })
}
