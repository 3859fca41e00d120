//! Strict INI-style experiment configuration.
//!
//! A config names datasets and methods and fixes every protocol knob; the
//! cross product (datasets x methods x dimensionalities) becomes the task
//! list. Parsing is deliberately unforgiving: unknown sections, unknown
//! keys, duplicates, and out-of-range values are errors carrying the line
//! number, never warnings, because a silently ignored key means an
//! experiment that quietly measures something other than intended.
//!
//! ```ini
//! [dataset.facebook]
//! path = data/facebook.edges
//!
//! [split]
//! strategy = st
//! f = 0.8
//! seed = 42
//! repeats = 3
//!
//! [evaluation]
//! setup = LP2
//! d = 128
//! classifier = LRCV
//!
//! [output]
//! dir = results
//!
//! [method.cn]
//! kind = cn
//! ```
//!
//! Sections: `[dataset.<name>]` (keys `path`, `timestamped`), `[split]`
//! (`strategy`, `f`, `seed`, `repeats`, `strict_train_nonedges`),
//! `[evaluation]` (`setup`, `d` — a comma list sweeps dimensionality,
//! `classifier`), `[classifier]` (`lambda`, `lambda_grid`, `folds`, `tol`,
//! `max_iters`, `max_depth`, `min_leaf`), `[metrics]` (`primary`, only
//! `auc_roc`), `[output]` (`dir`), and `[method.<name>]` with a required
//! `kind` plus per-kind parameter and `grid_*` keys. Relative paths resolve
//! against the config file's directory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::embed::line::LineOrder;
use crate::heuristics::HeuristicKind;
use crate::pipeline::{
    ClassifierConfig, ClassifierKind, DatasetSpec, EvalTask, MethodConfig, MethodSpec, Setup,
    DEFAULT_BASE_SEED, DEFAULT_DIM, DEFAULT_EXTERNAL_TIMEOUT_SECS, DEFAULT_REPEATS,
    DEFAULT_TRAIN_FRACTION,
};
use crate::split::{SplitConfig, SplitStrategy};
use crate::{Error, Result};

/// A fully interpreted experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    pub methods: Vec<MethodConfig>,
    pub strategy: SplitStrategy,
    pub f: f64,
    pub base_seed: u64,
    pub repeats: usize,
    pub split_cfg: SplitConfig,
    pub setup: Setup,
    /// Dimensionalities swept at the task level.
    pub dims: Vec<usize>,
    pub classifier: ClassifierConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse_path(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        ExperimentConfig::parse_str(&text, base)
    }

    /// Parse from text; relative paths resolve against `base`.
    pub fn parse_str(text: &str, base: &Path) -> Result<ExperimentConfig> {
        interpret(parse_ini(text)?, base)
    }

    /// The task list: datasets x methods x dims, in declaration order.
    pub fn tasks(&self) -> Vec<EvalTask> {
        let mut tasks = Vec::new();
        for dataset in &self.datasets {
            for method in &self.methods {
                for &d in &self.dims {
                    tasks.push(EvalTask {
                        dataset: dataset.clone(),
                        method: method.clone(),
                        setup: self.setup,
                        d,
                        f: self.f,
                        strategy: self.strategy,
                        repeats: self.repeats,
                        base_seed: self.base_seed,
                        classifier: self.classifier.clone(),
                        split_cfg: self.split_cfg.clone(),
                    });
                }
            }
        }
        tasks
    }

    /// Check that every referenced dataset file exists.
    pub fn validate_paths(&self) -> Result<()> {
        for dataset in &self.datasets {
            if !dataset.path.exists() {
                return Err(Error::MissingPath(dataset.path.clone()));
            }
        }
        Ok(())
    }
}

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line: Some(line), msg: msg.into() }
}

// ---------------------------------------------------------------------------
// Raw INI layer
// ---------------------------------------------------------------------------

struct RawSection {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

fn parse_ini(text: &str) -> Result<Vec<RawSection>> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(inner) = trimmed.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| cfg_err(line, format!("malformed section header {trimmed:?}")))?
                .trim();
            if name.is_empty() {
                return Err(cfg_err(line, "empty section name"));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(cfg_err(line, format!("section [{name}] declared twice")));
            }
            sections.push(RawSection { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("expected `key = value`, got {trimmed:?}")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(cfg_err(line, "empty key"));
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| cfg_err(line, "key-value pair before any [section]"))?;
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(cfg_err(line, format!("duplicate key {key:?} in section [{}]", section.name)));
        }
        section.entries.push((key, value, line));
    }
    Ok(sections)
}

/// Typed, consume-tracking view of one section's keys.
struct Keys {
    section: String,
    map: HashMap<String, (String, usize)>,
}

impl Keys {
    fn new(section: &RawSection) -> Keys {
        let map = section
            .entries
            .iter()
            .map(|(k, v, l)| (k.clone(), (v.clone(), *l)))
            .collect();
        Keys { section: section.name.clone(), map }
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str, section_line: usize) -> Result<(String, usize)> {
        self.take(key).ok_or_else(|| {
            cfg_err(section_line, format!("section [{}] is missing key {key:?}", self.section))
        })
    }

    /// Error on any key nobody consumed: strict parsing.
    fn finish(self) -> Result<()> {
        if let Some((key, (_, line))) = self.map.into_iter().min_by_key(|(_, (_, l))| *l) {
            return Err(cfg_err(line, format!("unknown key {key:?} in section [{}]", self.section)));
        }
        Ok(())
    }
}

fn take_f64(keys: &mut Keys, key: &str) -> Result<Option<(f64, usize)>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => {
            let parsed = v
                .parse::<f64>()
                .map_err(|_| cfg_err(line, format!("key {key:?}: expected a number, got {v:?}")))?;
            if !parsed.is_finite() {
                return Err(cfg_err(line, format!("key {key:?}: value must be finite")));
            }
            Ok(Some((parsed, line)))
        }
    }
}

fn take_usize(keys: &mut Keys, key: &str) -> Result<Option<(usize, usize)>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => {
            let parsed = v.parse::<usize>().map_err(|_| {
                cfg_err(line, format!("key {key:?}: expected a non-negative integer, got {v:?}"))
            })?;
            Ok(Some((parsed, line)))
        }
    }
}

fn take_u64(keys: &mut Keys, key: &str) -> Result<Option<(u64, usize)>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => {
            let parsed = v.parse::<u64>().map_err(|_| {
                cfg_err(line, format!("key {key:?}: expected a non-negative integer, got {v:?}"))
            })?;
            Ok(Some((parsed, line)))
        }
    }
}

fn take_bool(keys: &mut Keys, key: &str) -> Result<Option<bool>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => match v.as_str() {
            "true" => Ok(Some(true)),
            "false" => Ok(Some(false)),
            other => {
                Err(cfg_err(line, format!("key {key:?}: expected true or false, got {other:?}")))
            }
        },
    }
}

fn parse_list<T: FromStr>(value: &str, key: &str, line: usize) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(cfg_err(line, format!("key {key:?}: empty list element")));
        }
        out.push(part.parse::<T>().map_err(|_| {
            cfg_err(line, format!("key {key:?}: cannot parse list element {part:?}"))
        })?);
    }
    if out.is_empty() {
        return Err(cfg_err(line, format!("key {key:?}: list must be non-empty")));
    }
    Ok(out)
}

fn take_list_f64(keys: &mut Keys, key: &str) -> Result<Option<(Vec<f64>, usize)>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => Ok(Some((parse_list::<f64>(&v, key, line)?, line))),
    }
}

fn take_list_usize(keys: &mut Keys, key: &str) -> Result<Option<(Vec<usize>, usize)>> {
    match keys.take(key) {
        None => Ok(None),
        Some((v, line)) => Ok(Some((parse_list::<usize>(&v, key, line)?, line))),
    }
}

fn positive(value: (f64, usize), key: &str) -> Result<f64> {
    if value.0 > 0.0 {
        Ok(value.0)
    } else {
        Err(cfg_err(value.1, format!("key {key:?}: value must be positive")))
    }
}

fn at_least(value: (usize, usize), min: usize, key: &str) -> Result<usize> {
    if value.0 >= min {
        Ok(value.0)
    } else {
        Err(cfg_err(value.1, format!("key {key:?}: value must be at least {min}")))
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

fn interpret(sections: Vec<RawSection>, base: &Path) -> Result<ExperimentConfig> {
    let mut datasets: Vec<DatasetSpec> = Vec::new();
    let mut dataset_lines: Vec<usize> = Vec::new();
    let mut methods: Vec<MethodConfig> = Vec::new();

    let mut strategy = SplitStrategy::St;
    let mut f = DEFAULT_TRAIN_FRACTION;
    let mut base_seed = DEFAULT_BASE_SEED;
    let mut repeats = DEFAULT_REPEATS;
    let mut split_cfg = SplitConfig::default();
    let mut setup = Setup::Lp2;
    let mut dims = vec![DEFAULT_DIM];
    let mut classifier = ClassifierConfig::default();
    let mut output_dir = resolve(base, "results");

    for section in &sections {
        let line = section.line;
        let mut keys = Keys::new(section);
        if let Some(name) = section.name.strip_prefix("dataset.") {
            if name.is_empty() {
                return Err(cfg_err(line, "dataset section needs a name: [dataset.<name>]"));
            }
            if datasets.iter().any(|d| d.name == name) {
                return Err(cfg_err(line, format!("dataset {name:?} declared twice")));
            }
            let (path, _) = keys.require("path", line)?;
            let timestamped = take_bool(&mut keys, "timestamped")?.unwrap_or(false);
            keys.finish()?;
            datasets.push(DatasetSpec {
                name: name.to_string(),
                path: resolve(base, &path),
                timestamped,
            });
            dataset_lines.push(line);
        } else if let Some(name) = section.name.strip_prefix("method.") {
            if name.is_empty() {
                return Err(cfg_err(line, "method section needs a name: [method.<name>]"));
            }
            if methods.iter().any(|m| m.name == name) {
                return Err(cfg_err(line, format!("method {name:?} declared twice")));
            }
            methods.push(parse_method(name, &mut keys, line)?);
            keys.finish()?;
        } else {
            match section.name.as_str() {
                "split" => {
                    if let Some((v, vline)) = keys.take("strategy") {
                        strategy = v
                            .parse::<SplitStrategy>()
                            .map_err(|e| cfg_err(vline, format!("key \"strategy\": {e}")))?;
                    }
                    if let Some(value) = take_f64(&mut keys, "f")? {
                        if !(value.0 > 0.0 && value.0 < 1.0) {
                            return Err(cfg_err(
                                value.1,
                                format!("key \"f\": train fraction must lie in (0,1), got {}", value.0),
                            ));
                        }
                        f = value.0;
                    }
                    if let Some((v, _)) = take_u64(&mut keys, "seed")? {
                        base_seed = v;
                    }
                    if let Some(value) = take_usize(&mut keys, "repeats")? {
                        repeats = at_least(value, 1, "repeats")?;
                    }
                    if let Some(v) = take_bool(&mut keys, "strict_train_nonedges")? {
                        split_cfg.strict_train_nonedges = v;
                    }
                    keys.finish()?;
                }
                "evaluation" => {
                    if let Some((v, vline)) = keys.take("setup") {
                        setup = v
                            .parse::<Setup>()
                            .map_err(|e| cfg_err(vline, format!("key \"setup\": {e}")))?;
                    }
                    if let Some((list, vline)) = take_list_usize(&mut keys, "d")? {
                        for &d in &list {
                            if d < 1 {
                                return Err(cfg_err(vline, "key \"d\": dimensionality must be at least 1"));
                            }
                        }
                        dims = list;
                    }
                    if let Some((v, vline)) = keys.take("classifier") {
                        classifier.kind = v
                            .parse::<ClassifierKind>()
                            .map_err(|e| cfg_err(vline, format!("key \"classifier\": {e}")))?;
                    }
                    keys.finish()?;
                }
                "classifier" => {
                    if let Some(value) = take_f64(&mut keys, "lambda")? {
                        if value.0 < 0.0 {
                            return Err(cfg_err(value.1, "key \"lambda\": penalty must be non-negative"));
                        }
                        classifier.lambda = value.0;
                    }
                    if let Some((list, vline)) = take_list_f64(&mut keys, "lambda_grid")? {
                        if list.iter().any(|&l| l < 0.0) {
                            return Err(cfg_err(vline, "key \"lambda_grid\": penalties must be non-negative"));
                        }
                        classifier.lambda_grid = list;
                    }
                    if let Some(value) = take_usize(&mut keys, "folds")? {
                        classifier.folds = at_least(value, 2, "folds")?;
                    }
                    if let Some(value) = take_f64(&mut keys, "tol")? {
                        classifier.tol = positive(value, "tol")?;
                    }
                    if let Some(value) = take_usize(&mut keys, "max_iters")? {
                        classifier.max_iters = at_least(value, 1, "max_iters")?;
                    }
                    if let Some(value) = take_usize(&mut keys, "max_depth")? {
                        classifier.max_depth = at_least(value, 1, "max_depth")?;
                    }
                    if let Some(value) = take_usize(&mut keys, "min_leaf")? {
                        classifier.min_leaf = at_least(value, 1, "min_leaf")?;
                    }
                    keys.finish()?;
                }
                "metrics" => {
                    if let Some((v, vline)) = keys.take("primary") {
                        if v != "auc_roc" {
                            return Err(cfg_err(
                                vline,
                                format!("key \"primary\": only auc_roc is supported, got {v:?}"),
                            ));
                        }
                    }
                    keys.finish()?;
                }
                "output" => {
                    if let Some((v, _)) = keys.take("dir") {
                        output_dir = resolve(base, &v);
                    }
                    keys.finish()?;
                }
                other => {
                    return Err(cfg_err(line, format!("unknown section [{other}]")));
                }
            }
        }
    }

    if datasets.is_empty() {
        return Err(Error::Config {
            line: None,
            msg: "config declares no [dataset.<name>] section".into(),
        });
    }
    if methods.is_empty() {
        return Err(Error::Config {
            line: None,
            msg: "config declares no [method.<name>] section".into(),
        });
    }
    if strategy == SplitStrategy::Timestamp {
        for (dataset, &line) in datasets.iter().zip(&dataset_lines) {
            if !dataset.timestamped {
                return Err(cfg_err(
                    line,
                    format!(
                        "timestamp split strategy requires timestamped datasets, but {:?} is static",
                        dataset.name
                    ),
                ));
            }
        }
    }

    Ok(ExperimentConfig {
        datasets,
        methods,
        strategy,
        f,
        base_seed,
        repeats,
        split_cfg,
        setup,
        dims,
        classifier,
        output_dir,
    })
}

fn parse_method(name: &str, keys: &mut Keys, line: usize) -> Result<MethodConfig> {
    let (kind, kind_line) = keys.require("kind", line)?;
    match kind.as_str() {
        "cn" | "jc" | "aa" | "rai" | "pa" => {
            let heuristic = kind.parse::<HeuristicKind>().expect("literal matches");
            Ok(MethodConfig::new(name, MethodSpec::Heuristic(heuristic)))
        }
        "ne_heuristics" => Ok(MethodConfig::new(name, MethodSpec::NeHeuristics)),
        "le" => Ok(MethodConfig::new(name, MethodSpec::Le)),
        "gf" => parse_gf(name, keys),
        "node2vec" => parse_node2vec(name, keys),
        "line" => parse_line(name, keys),
        "external" => {
            let (command, cmd_line) = keys.require("command", line)?;
            for placeholder in ["{input}", "{output}", "{dim}"] {
                if !command.contains(placeholder) {
                    return Err(cfg_err(
                        cmd_line,
                        format!("key \"command\": template must contain the {placeholder} placeholder"),
                    ));
                }
            }
            let timeout_secs = match take_u64(keys, "timeout_secs")? {
                Some((v, vline)) if v == 0 => {
                    return Err(cfg_err(vline, "key \"timeout_secs\": value must be at least 1"));
                }
                Some((v, _)) => v,
                None => DEFAULT_EXTERNAL_TIMEOUT_SECS,
            };
            Ok(MethodConfig::new(name, MethodSpec::External { command, timeout_secs }))
        }
        other => Err(cfg_err(
            kind_line,
            format!(
                "key \"kind\": unknown method kind {other:?} (expected cn, jc, aa, rai, pa, \
                 ne_heuristics, gf, le, node2vec, line, or external)"
            ),
        )),
    }
}

fn parse_gf(name: &str, keys: &mut Keys) -> Result<MethodConfig> {
    let MethodSpec::Gf { lambda: dl, learn_rate: dlr, epochs: de } = MethodSpec::gf_default()
    else {
        unreachable!()
    };
    let lambda = match take_f64(keys, "lambda")? {
        Some(value) => {
            if value.0 < 0.0 {
                return Err(cfg_err(value.1, "key \"lambda\": penalty must be non-negative"));
            }
            value.0
        }
        None => dl,
    };
    let learn_rate = match take_f64(keys, "lr")? {
        Some(value) => positive(value, "lr")?,
        None => dlr,
    };
    let epochs = match take_usize(keys, "epochs")? {
        Some(value) => at_least(value, 1, "epochs")?,
        None => de,
    };
    let spec = MethodSpec::Gf { lambda, learn_rate, epochs };

    let grid_lambda = take_list_f64(keys, "grid_lambda")?;
    let grid_lr = take_list_f64(keys, "grid_lr")?;
    let grid_epochs = take_list_usize(keys, "grid_epochs")?;
    let grid = if grid_lambda.is_none() && grid_lr.is_none() && grid_epochs.is_none() {
        spec.default_grid()
    } else {
        let lambdas = grid_lambda.map_or(vec![lambda], |(l, _)| l);
        let rates = grid_lr.map_or(vec![learn_rate], |(l, _)| l);
        let epoch_list = grid_epochs.map_or(vec![epochs], |(l, _)| l);
        let mut grid = Vec::new();
        for &gl in &lambdas {
            for &gr in &rates {
                for &ge in &epoch_list {
                    grid.push(MethodSpec::Gf { lambda: gl, learn_rate: gr, epochs: ge });
                }
            }
        }
        grid
    };
    Ok(MethodConfig { name: name.to_string(), spec, grid })
}

fn parse_node2vec(name: &str, keys: &mut Keys) -> Result<MethodConfig> {
    let MethodSpec::Node2vec {
        num_walks: dnw,
        walk_len: dwl,
        window: dwin,
        p: dp,
        q: dq,
        negatives: dneg,
        learn_rate: dlr,
        epochs: de,
    } = MethodSpec::node2vec_default()
    else {
        unreachable!()
    };
    let num_walks = match take_usize(keys, "num_walks")? {
        Some(value) => at_least(value, 1, "num_walks")?,
        None => dnw,
    };
    let walk_len = match take_usize(keys, "walk_len")? {
        Some(value) => at_least(value, 1, "walk_len")?,
        None => dwl,
    };
    let window = match take_usize(keys, "window")? {
        Some(value) => at_least(value, 1, "window")?,
        None => dwin,
    };
    let p = match take_f64(keys, "p")? {
        Some(value) => positive(value, "p")?,
        None => dp,
    };
    let q = match take_f64(keys, "q")? {
        Some(value) => positive(value, "q")?,
        None => dq,
    };
    let negatives = match take_usize(keys, "negatives")? {
        Some(value) => at_least(value, 1, "negatives")?,
        None => dneg,
    };
    let learn_rate = match take_f64(keys, "lr")? {
        Some(value) => positive(value, "lr")?,
        None => dlr,
    };
    let epochs = match take_usize(keys, "epochs")? {
        Some(value) => at_least(value, 1, "epochs")?,
        None => de,
    };
    let spec = MethodSpec::Node2vec {
        num_walks,
        walk_len,
        window,
        p,
        q,
        negatives,
        learn_rate,
        epochs,
    };

    let grid_walks = take_list_usize(keys, "grid_walks")?;
    let grid_window = take_list_usize(keys, "grid_window")?;
    let grid_pq = take_list_f64(keys, "grid_pq")?;
    let grid = if grid_walks.is_none() && grid_window.is_none() && grid_pq.is_none() {
        spec.default_grid()
    } else {
        // grid_walks ties walk count to walk length, mirroring the standard
        // grid; absent axes keep the configured point.
        let shapes: Vec<(usize, usize)> = match grid_walks {
            Some((list, vline)) => {
                if list.iter().any(|&w| w < 1) {
                    return Err(cfg_err(vline, "key \"grid_walks\": entries must be at least 1"));
                }
                list.into_iter().map(|w| (w, w)).collect()
            }
            None => vec![(num_walks, walk_len)],
        };
        let windows: Vec<usize> = match grid_window {
            Some((list, vline)) => {
                if list.iter().any(|&w| w < 1) {
                    return Err(cfg_err(vline, "key \"grid_window\": entries must be at least 1"));
                }
                list
            }
            None => vec![window],
        };
        let pqs: Vec<(f64, f64)> = match grid_pq {
            Some((list, vline)) => {
                if list.iter().any(|&v| v <= 0.0) {
                    return Err(cfg_err(vline, "key \"grid_pq\": entries must be positive"));
                }
                list.into_iter().map(|v| (v, v)).collect()
            }
            None => vec![(p, q)],
        };
        let mut grid = Vec::new();
        for &(nw, wl) in &shapes {
            for &win in &windows {
                for &(gp, gq) in &pqs {
                    grid.push(MethodSpec::Node2vec {
                        num_walks: nw,
                        walk_len: wl,
                        window: win,
                        p: gp,
                        q: gq,
                        negatives,
                        learn_rate,
                        epochs,
                    });
                }
            }
        }
        grid
    };
    Ok(MethodConfig { name: name.to_string(), spec, grid })
}

fn parse_line(name: &str, keys: &mut Keys) -> Result<MethodConfig> {
    let MethodSpec::Line {
        order: dord,
        rho: drho,
        negative_ratio: dneg,
        budget_per_edge: dbud,
    } = MethodSpec::line_default()
    else {
        unreachable!()
    };
    let order = match keys.take("order") {
        Some((v, vline)) => v
            .parse::<LineOrder>()
            .map_err(|e| cfg_err(vline, format!("key \"order\": {e}")))?,
        None => dord,
    };
    let rho = match take_f64(keys, "rho")? {
        Some(value) => positive(value, "rho")?,
        None => drho,
    };
    let negative_ratio = match take_usize(keys, "negative_ratio")? {
        Some(value) => at_least(value, 1, "negative_ratio")?,
        None => dneg,
    };
    let budget_per_edge = match take_usize(keys, "budget_per_edge")? {
        Some(value) => at_least(value, 1, "budget_per_edge")?,
        None => dbud,
    };
    let spec = MethodSpec::Line { order, rho, negative_ratio, budget_per_edge };

    let grid_rho = take_list_f64(keys, "grid_rho")?;
    let grid_ratio = take_list_usize(keys, "grid_negative_ratio")?;
    let grid = if grid_rho.is_none() && grid_ratio.is_none() {
        spec.default_grid()
    } else {
        let rhos = match grid_rho {
            Some((list, vline)) => {
                if list.iter().any(|&r| r <= 0.0) {
                    return Err(cfg_err(vline, "key \"grid_rho\": entries must be positive"));
                }
                list
            }
            None => vec![rho],
        };
        let ratios = match grid_ratio {
            Some((list, vline)) => {
                if list.iter().any(|&r| r < 1) {
                    return Err(cfg_err(
                        vline,
                        "key \"grid_negative_ratio\": entries must be at least 1",
                    ));
                }
                list
            }
            None => vec![negative_ratio],
        };
        let mut grid = Vec::new();
        for &gr in &rhos {
            for &gn in &ratios {
                grid.push(MethodSpec::Line {
                    order,
                    rho: gr,
                    negative_ratio: gn,
                    budget_per_edge,
                });
            }
        }
        grid
    };
    Ok(MethodConfig { name: name.to_string(), spec, grid })
}
