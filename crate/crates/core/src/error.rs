use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the toolkit.
///
/// Variants carry enough context to be actionable from a CLI message: parse
/// errors name the line, budget errors name the bound, convergence errors
/// report the attained quantity.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("edge list contains no usable edges")]
    EmptyGraph,

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self pair ({0}, {0}) cannot be scored")]
    SelfPair(usize),

    #[error("graph is not connected ({components} components); reduce to the main component first")]
    Disconnected { components: usize },

    #[error("train fraction {f} outside the open interval (0, 1)")]
    TrainFraction { f: f64 },

    #[error(
        "train fraction {f} keeps {target} edges but a spanning tree needs {tree} \
         ({n} nodes); use f >= {min_f:.4}"
    )]
    TrainFractionBelowTree { f: f64, target: usize, tree: usize, n: usize, min_f: f64 },

    #[error(
        "cannot sample {requested} {role} non-edges: only {available} candidate pairs \
         ({universe} eligible nodes, {excluded} excluded pairs)"
    )]
    NonEdgeBudget { role: &'static str, requested: usize, available: usize, universe: usize, excluded: usize },

    #[error("embedding dimension {d} invalid for graph with {n} nodes: {msg}")]
    EmbedDim { d: usize, n: usize, msg: String },

    #[error("{method} diverged at epoch {epoch}: non-finite parameters")]
    Diverged { method: &'static str, epoch: usize },

    #[error(
        "eigensolver did not converge: worst residual {residual:.3e} after {iters} iterations \
         (tolerance {tol:.1e})"
    )]
    EigenNotConverged { residual: f64, iters: usize, tol: f64 },

    #[error(
        "logistic regression did not converge: gradient norm {grad_norm:.3e} after {iters} \
         iterations (tolerance {tol:.1e})"
    )]
    LrNotConverged { grad_norm: f64, iters: usize, tol: f64 },

    #[error("feature matrix has {got} columns, model expects {want}")]
    FeatureDim { got: usize, want: usize },

    #[error("labels contain a single class; need both positives and negatives")]
    SingleClass,

    #[error("labels/scores length mismatch: {labels} labels vs {scores} scores")]
    LengthMismatch { labels: usize, scores: usize },

    #[error("external command exited with {status}: {stderr}")]
    ExternalFailed { status: String, stderr: String },

    #[error("external command timed out after {secs} s")]
    ExternalTimeout { secs: u64 },

    #[error("external embedding missing node {node} (expected rows for all {n} train nodes)")]
    ExternalMissingNode { node: usize, n: usize },

    #[error("external embedding row for node {node} has {got} values, expected {want}")]
    ExternalDim { node: usize, got: usize, want: usize },

    #[error("command template must contain the {0} placeholder")]
    TemplateMissing(&'static str),

    #[error("all {attempted} hyperparameter candidates failed during tuning; first failure: {first}")]
    AllCandidatesFailed { attempted: usize, first: Box<Error> },

    #[error("config error{} : {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, msg: String },

    #[error("dataset path does not exist: {0}")]
    MissingPath(PathBuf),

    #[error("train/test leakage: {overlap} train-graph edges appear in the test edge set")]
    Leakage { overlap: usize },

    #[error("split directory {0} is missing file {1}")]
    SplitFileMissing(PathBuf, String),

    #[error("results store corrupt at {path}: {msg}")]
    StoreCorrupt { path: PathBuf, msg: String },

    #[error("model deserialization failed: {0}")]
    ModelFormat(String),

    #[error("{stage} failed for {unit}: {source}")]
    Stage { stage: &'static str, unit: String, #[source] source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage and task it occurred in.
    pub fn in_stage(self, stage: &'static str, unit: impl Into<String>) -> Error {
        Error::Stage { stage, unit: unit.into(), source: Box::new(self) }
    }
}
