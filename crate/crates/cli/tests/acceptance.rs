//! Acceptance suite: one test per numbered criterion, each printing a single
//! `ACCEPTANCE <n> PASS/FAIL` line (run with `--nocapture` to see the lines
//! for passing tests).
//!
//! Criteria 1-5 score real datasets and need the edge lists under `./data`
//! at the repository root (override with `LPBENCH_DATA`). Run
//! `scripts/fetch_data.sh` first; without the files these tests fail with
//! instructions rather than pretending to pass. Criteria 6-9 are
//! self-contained.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lpbench::embed::le::le_eigenpairs;
use lpbench::embed::line::{line_sample_grad, line_sample_loss};
use lpbench::embed::sgns::{sgns_triple_grad, sgns_triple_loss};
use lpbench::gen;
use lpbench::graph::{Graph, Pair};
use lpbench::heuristics::{score_pair, HeuristicKind};
use lpbench::metrics::auc_roc;
use lpbench::pipeline::{
    self, ClassifierConfig, ClassifierKind, DatasetSpec, EvalTask, MethodConfig, MethodSpec,
    ResultsStore,
};
use lpbench::predict::{lr_gradient, lr_objective, Features};
use lpbench::split::{self, SplitConfig, SplitStrategy};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn pass(criterion: usize, detail: &str) {
    println!("ACCEPTANCE {criterion} PASS — {detail}");
}

fn fail(criterion: usize, detail: &str) -> ! {
    let line = format!("ACCEPTANCE {criterion} FAIL — {detail}");
    println!("{line}");
    panic!("{line}");
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn data_dir() -> PathBuf {
    std::env::var_os("LPBENCH_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("data"))
}

/// Resolve dataset files for a data-dependent criterion, failing it with
/// download instructions when any are absent.
fn require_data(criterion: usize, files: &[&str]) -> Vec<PathBuf> {
    let dir = data_dir();
    let missing: Vec<&str> =
        files.iter().copied().filter(|f| !dir.join(f).exists()).collect();
    if !missing.is_empty() {
        fail(
            criterion,
            &format!(
                "dataset file(s) [{}] not found under {}; run scripts/fetch_data.sh \
                 (network access required) or set LPBENCH_DATA to a directory that \
                 holds them, then re-run",
                missing.join(", "),
                dir.display()
            ),
        );
    }
    files.iter().map(|f| dir.join(f)).collect()
}

fn dataset(name: &str, path: PathBuf) -> DatasetSpec {
    DatasetSpec { name: name.into(), path, timestamped: false }
}

fn heuristic(kind: HeuristicKind) -> MethodConfig {
    MethodConfig::new(kind.as_str(), MethodSpec::Heuristic(kind))
}

/// Evaluate every repeat of a task and return the per-repeat test AUCs.
fn run_repeats(criterion: usize, task: &EvalTask) -> Vec<f64> {
    let mut aucs = Vec::with_capacity(task.repeats);
    for repeat in 0..task.repeats {
        match pipeline::evaluate_method(task, repeat) {
            Ok(row) => aucs.push(row.test_auc),
            Err(err) => fail(
                criterion,
                &format!("task {} repeat {repeat} failed: {err}", task.id()),
            ),
        }
    }
    aucs
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Criterion 1: heuristic scores on Facebook
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_facebook_heuristics() {
    const TOL: f64 = 0.010;
    // Reference test AUC-ROC per heuristic: ST split, f = 0.8, mean of 3
    // repeats.
    const EXPECTED: [(HeuristicKind, f64); 5] = [
        (HeuristicKind::CommonNeighbors, 0.992),
        (HeuristicKind::Jaccard, 0.990),
        (HeuristicKind::AdamicAdar, 0.993),
        (HeuristicKind::PreferentialAttachment, 0.842),
        (HeuristicKind::ResourceAllocation, 0.994),
    ];
    let paths = require_data(1, &["facebook.edges"]);

    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (kind, want) in EXPECTED {
        let task = EvalTask::new(dataset("facebook", paths[0].clone()), heuristic(kind));
        let got = mean(&run_repeats(1, &task));
        summary.push(format!("{kind}={got:.4}"));
        if (got - want).abs() > TOL {
            problems.push(format!("{kind}: got {got:.4}, want {want:.3} ± {TOL}"));
        }
    }
    if !problems.is_empty() {
        fail(1, &problems.join("; "));
    }
    pass(1, &format!("facebook heuristics within ±{TOL}: {}", summary.join(" ")));
}

// ---------------------------------------------------------------------------
// Criterion 2: below-chance neighborhood heuristics on StudentDB
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_studentdb_below_chance() {
    // On a k-partite graph connected pairs share no neighbors, so every
    // neighborhood-overlap heuristic scores true edges below random pairs
    // while preferential attachment stays strong.
    const NEIGHBORHOOD_WANT: f64 = 0.370;
    const NEIGHBORHOOD_TOL: f64 = 0.03;
    const PA_WANT: f64 = 0.922;
    const PA_TOL: f64 = 0.02;
    let paths = require_data(2, &["studentdb.edges"]);

    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for kind in [
        HeuristicKind::CommonNeighbors,
        HeuristicKind::Jaccard,
        HeuristicKind::AdamicAdar,
        HeuristicKind::ResourceAllocation,
        HeuristicKind::PreferentialAttachment,
    ] {
        let task = EvalTask::new(dataset("studentdb", paths[0].clone()), heuristic(kind));
        let got = mean(&run_repeats(2, &task));
        summary.push(format!("{kind}={got:.4}"));
        let (want, tol) = if kind == HeuristicKind::PreferentialAttachment {
            (PA_WANT, PA_TOL)
        } else {
            (NEIGHBORHOOD_WANT, NEIGHBORHOOD_TOL)
        };
        if (got - want).abs() > tol {
            problems.push(format!("{kind}: got {got:.4}, want {want} ± {tol}"));
        }
    }
    if !problems.is_empty() {
        fail(2, &problems.join("; "));
    }
    pass(2, &format!("studentdb scores as expected: {}", summary.join(" ")));
}

// ---------------------------------------------------------------------------
// Criterion 3: stacked heuristic features as a classifier input
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_stacked_heuristic_features() {
    const STUDENTDB_WANT: f64 = 0.966;
    const STUDENTDB_TOL: f64 = 0.02;
    // Mean of the per-dataset reference scores over the five small datasets
    // (studentdb 0.966, facebook 0.993, gr-qc 0.976, ppi 0.927,
    // wikipedia 0.929).
    const FIVE_SET_WANT: f64 = 0.9582;
    const FIVE_SET_TOL: f64 = 0.02;
    const DATASETS: [&str; 5] = ["studentdb", "facebook", "gr-qc", "ppi", "wikipedia"];

    let files: Vec<String> = DATASETS.iter().map(|d| format!("{d}.edges")).collect();
    let file_refs: Vec<&str> = files.iter().map(String::as_str).collect();
    let paths = require_data(3, &file_refs);

    let mut means = Vec::new();
    let mut summary = Vec::new();
    for (name, path) in DATASETS.iter().zip(paths) {
        let task = EvalTask::new(
            dataset(name, path),
            MethodConfig::new("ne_heuristics", MethodSpec::NeHeuristics),
        );
        let got = mean(&run_repeats(3, &task));
        summary.push(format!("{name}={got:.4}"));
        means.push(got);
    }

    let mut problems = Vec::new();
    if (means[0] - STUDENTDB_WANT).abs() > STUDENTDB_TOL {
        problems.push(format!(
            "studentdb: got {:.4}, want {STUDENTDB_WANT} ± {STUDENTDB_TOL}",
            means[0]
        ));
    }
    let five_set = mean(&means);
    if (five_set - FIVE_SET_WANT).abs() > FIVE_SET_TOL {
        problems.push(format!(
            "five-dataset mean: got {five_set:.4}, want {FIVE_SET_WANT} ± {FIVE_SET_TOL}"
        ));
    }
    if !problems.is_empty() {
        fail(3, &problems.join("; "));
    }
    pass(
        3,
        &format!("ne_heuristics {}; five-dataset mean {five_set:.4}", summary.join(" ")),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: native embedding methods
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_native_embeddings() {
    // Loose tolerances: independent implementations of these methods are
    // documented to spread by several AUC points on the same data.
    let paths = require_data(4, &["facebook.edges", "gr-qc.edges", "ppi.edges"]);
    let (facebook, gr_qc, ppi) = (&paths[0], &paths[1], &paths[2]);

    let mut problems = Vec::new();
    let mut summary = Vec::new();
    let mut check = |name: &str, got: f64, ok: bool, want: &str| {
        summary.push(format!("{name}={got:.4}"));
        if !ok {
            problems.push(format!("{name}: got {got:.4}, want {want}"));
        }
    };

    let task = EvalTask::new(
        dataset("facebook", facebook.clone()),
        MethodConfig::new("node2vec", MethodSpec::node2vec_default()),
    );
    let got = mean(&run_repeats(4, &task));
    check("node2vec/facebook", got, got >= 0.96, ">= 0.96");

    let task = EvalTask::new(
        dataset("gr-qc", gr_qc.clone()),
        MethodConfig::new("line", MethodSpec::line_default()),
    );
    let got = mean(&run_repeats(4, &task));
    check("line/gr-qc", got, (got - 0.984).abs() <= 0.03, "0.984 ± 0.03");

    let task = EvalTask::new(
        dataset("ppi", ppi.clone()),
        MethodConfig::new("gf", MethodSpec::gf_default()),
    );
    let got = mean(&run_repeats(4, &task));
    check("gf/ppi", got, (got - 0.837).abs() <= 0.05, "0.837 ± 0.05");

    let task = EvalTask::new(
        dataset("facebook", facebook.clone()),
        MethodConfig::new("le", MethodSpec::Le),
    );
    let got = mean(&run_repeats(4, &task));
    check("le/facebook", got, (got - 0.992).abs() <= 0.05, "0.992 ± 0.05");

    if !problems.is_empty() {
        fail(4, &problems.join("; "));
    }
    pass(4, &summary.join(" "));
}

// ---------------------------------------------------------------------------
// Criterion 5: split strategy properties
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_split_properties() {
    const SEEDS: [u64; 3] = [42, 43, 44];
    const MAX_RANDOM_LOSS: f64 = 0.09; // "up to ~8%" of nodes
    const MAX_REPEAT_STD: f64 = 0.01;
    let paths = require_data(5, &["gr-qc.edges", "studentdb.edges"]);

    let cfg = SplitConfig::default();
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, path) in ["gr-qc", "studentdb"].iter().zip(&paths) {
        let g = Graph::load_edge_list_path(path)
            .unwrap_or_else(|err| fail(5, &format!("cannot load {name}: {err}")))
            .main_component()
            .0;
        let mut max_random_loss = 0.0f64;
        let mut sizes: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
        for seed in SEEDS {
            for (label, strategy) in [
                ("random", SplitStrategy::Random),
                ("st", SplitStrategy::St),
                ("dft", SplitStrategy::Dft),
            ] {
                let s = split::make_split(&g, strategy, 0.8, seed, &cfg)
                    .unwrap_or_else(|err| {
                        fail(5, &format!("{label} split on {name} seed {seed}: {err}"))
                    });
                let loss = s.node_loss(g.n());
                match strategy {
                    SplitStrategy::Random => {
                        max_random_loss = max_random_loss.max(loss);
                        if loss > MAX_RANDOM_LOSS {
                            problems.push(format!(
                                "{name} random seed {seed}: node loss {loss:.4} > {MAX_RANDOM_LOSS}"
                            ));
                        }
                    }
                    _ => {
                        if loss != 0.0 {
                            problems.push(format!(
                                "{name} {label} seed {seed}: lost nodes (loss {loss:.6})"
                            ));
                        }
                        sizes.entry(label).or_default().push((s.e_train.len(), s.e_test.len()));
                    }
                }
            }
        }
        if max_random_loss <= 0.0 {
            problems.push(format!("{name}: random strategy never lost a node over 3 seeds"));
        }
        summary.push(format!("{name} max random loss {:.2}%", 100.0 * max_random_loss));
        for (label, observed) in &sizes {
            if observed.windows(2).any(|w| w[0] != w[1]) {
                problems.push(format!("{name} {label}: split sizes vary across seeds: {observed:?}"));
            }
        }
    }

    // Repeat-to-repeat stability on a graph with |V| >= 3000.
    let task = EvalTask::new(
        dataset("gr-qc", paths[0].clone()),
        heuristic(HeuristicKind::CommonNeighbors),
    );
    let aucs = run_repeats(5, &task);
    let std = std_dev(&aucs);
    summary.push(format!("gr-qc cn std {std:.4}"));
    if std > MAX_REPEAT_STD {
        problems.push(format!("gr-qc cn: repeat std {std:.4} > {MAX_REPEAT_STD}"));
    }

    if !problems.is_empty() {
        fail(5, &problems.join("; "));
    }
    pass(5, &summary.join("; "));
}

// ---------------------------------------------------------------------------
// Criterion 6: uniformity of the spanning tree sampler
// ---------------------------------------------------------------------------

/// All spanning trees of `g` in canonical form, found by brute force.
fn enumerate_spanning_trees(g: &Graph) -> Vec<Vec<Pair>> {
    let edges: Vec<Pair> = g.edges().collect();
    let n = g.n();
    let mut trees = Vec::new();
    let mut pick = vec![false; edges.len()];
    fn recurse(
        edges: &[Pair],
        pick: &mut Vec<bool>,
        from: usize,
        chosen: usize,
        n: usize,
        trees: &mut Vec<Vec<Pair>>,
    ) {
        if chosen == n - 1 {
            // Union-find acyclicity/connectivity check.
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            let mut merged = 0;
            for (e, &(i, j)) in edges.iter().enumerate() {
                if pick[e] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                        merged += 1;
                    }
                }
            }
            if merged == n - 1 {
                let mut tree: Vec<Pair> =
                    edges.iter().enumerate().filter(|(e, _)| pick[*e]).map(|(_, &p)| p).collect();
                tree.sort_unstable();
                trees.push(tree);
            }
            return;
        }
        if from >= edges.len() {
            return;
        }
        pick[from] = true;
        recurse(edges, pick, from + 1, chosen + 1, n, trees);
        pick[from] = false;
        recurse(edges, pick, from + 1, chosen, n, trees);
    }
    recurse(&edges, &mut pick, 0, 0, n, &mut trees);
    trees
}

#[test]
fn criterion_6_spanning_tree_uniformity() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    const SAMPLES: usize = 40_000;
    const ALPHA: f64 = 0.01;
    let started = Instant::now();

    let mut summary = Vec::new();
    for (label, g, expected_trees) in
        [("C4", gen::cycle(4), 4usize), ("K4", gen::complete(4), 16)]
    {
        let trees = enumerate_spanning_trees(&g);
        if trees.len() != expected_trees {
            fail(6, &format!("{label}: enumerated {} trees, expected {expected_trees}", trees.len()));
        }
        let index: HashMap<&Vec<Pair>, usize> =
            trees.iter().enumerate().map(|(i, t)| (t, i)).collect();

        let mut counts = vec![0usize; trees.len()];
        for seed in 0..SAMPLES as u64 {
            let mut tree = split::wilson_ust(&g, seed)
                .unwrap_or_else(|err| fail(6, &format!("{label}: sampler failed: {err}")));
            tree.iter_mut().for_each(|p| *p = (p.0.min(p.1), p.0.max(p.1)));
            tree.sort_unstable();
            let Some(&i) = index.get(&tree) else {
                fail(6, &format!("{label}: sampled a non-tree edge set {tree:?}"));
            };
            counts[i] += 1;
        }

        let expected = SAMPLES as f64 / trees.len() as f64;
        let statistic: f64 =
            counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let dof = (trees.len() - 1) as f64;
        let critical = ChiSquared::new(dof).unwrap().inverse_cdf(1.0 - ALPHA);
        if statistic >= critical {
            fail(
                6,
                &format!(
                    "{label}: chi-square {statistic:.2} >= critical {critical:.2} \
                     (dof {dof}, alpha {ALPHA}); counts {counts:?}"
                ),
            );
        }
        summary.push(format!("{label} chi2 {statistic:.2} < {critical:.2}"));
    }

    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        fail(6, &format!("sampling took {elapsed:.1}s, budget 10s"));
    }
    pass(6, &format!("{} in {elapsed:.1}s", summary.join(", ")));
}

// ---------------------------------------------------------------------------
// Criterion 7: oracle equivalences
// ---------------------------------------------------------------------------

fn relative_gap(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = numeric.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1e-12)
}

/// Central finite differences of `f` at `x`.
fn finite_diff(mut f: impl FnMut(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    const H: f64 = 1e-6;
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        probe[k] = x[k] + H;
        let hi = f(&probe);
        probe[k] = x[k] - H;
        let lo = f(&probe);
        probe[k] = x[k];
        grad.push((hi - lo) / (2.0 * H));
    }
    grad
}

#[test]
fn criterion_7_oracle_equivalences() {
    const GRAD_TOL: f64 = 1e-5;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0acc);

    // (a) AUC-ROC against brute-force pair counting, ties counted half.
    for case in 0..200 {
        let n_pos = rng.gen_range(1..=30);
        let n_neg = rng.gen_range(1..=30);
        let mut scores = Vec::with_capacity(n_pos + n_neg);
        let mut labels = Vec::with_capacity(n_pos + n_neg);
        for i in 0..n_pos + n_neg {
            // Half the cases draw from a coarse grid so ties are common.
            let s = if case % 2 == 0 {
                rng.gen_range(0..=8) as f64 / 8.0
            } else {
                rng.gen::<f64>()
            };
            scores.push(s);
            labels.push(i < n_pos);
        }
        let mut num = 0.0;
        for p in 0..n_pos {
            for q in n_pos..n_pos + n_neg {
                num += match scores[p].partial_cmp(&scores[q]).unwrap() {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
        }
        let brute = num / (n_pos * n_neg) as f64;
        let got = auc_roc(&scores, &labels)
            .unwrap_or_else(|err| fail(7, &format!("auc case {case}: {err}")));
        if (got - brute).abs() > 1e-12 {
            fail(7, &format!("auc case {case}: got {got}, brute force {brute}"));
        }
    }

    // (b) Heuristics against a set-based oracle on small random graphs.
    for seed in 0..12 {
        let n = 5 + (seed as usize * 7) % 26; // 5..=30
        let g = gen::erdos_renyi(n, 0.3, seed);
        let sets: Vec<std::collections::HashSet<usize>> =
            (0..n).map(|i| g.neighbors(i).unwrap().iter().copied().collect()).collect();
        for i in 0..n {
            for j in i + 1..n {
                let got = score_pair(&g, i, j)
                    .unwrap_or_else(|err| fail(7, &format!("score_pair({i},{j}): {err}")));
                let common: Vec<usize> = sets[i].intersection(&sets[j]).copied().collect();
                let cn = common.len() as f64;
                let union = sets[i].union(&sets[j]).count();
                let jc = if union == 0 { 0.0 } else { cn / union as f64 };
                let aa: f64 = common.iter().map(|&k| 1.0 / (sets[k].len() as f64).ln()).sum();
                let rai: f64 = common.iter().map(|&k| 1.0 / sets[k].len() as f64).sum();
                let pa = (sets[i].len() * sets[j].len()) as f64;
                for (name, got_v, want_v) in [
                    ("cn", got.cn, cn),
                    ("jc", got.jc, jc),
                    ("aa", got.aa, aa),
                    ("rai", got.rai, rai),
                    ("pa", got.pa, pa),
                ] {
                    if (got_v - want_v).abs() > 1e-12 {
                        fail(7, &format!("heuristic {name} on pair ({i},{j}) seed {seed}: got {got_v}, oracle {want_v}"));
                    }
                }
            }
        }
    }

    // (c) Analytic gradients against central finite differences.
    let d = 7;
    for trial in 0..5 {
        let vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect()
        };
        let (x, cp, cn) = (vec(&mut rng), vec(&mut rng), vec(&mut rng));

        let (gx, gcp, gcn) = sgns_triple_grad(&x, &cp, &cn);
        for (label, analytic, numeric) in [
            ("x", &gx, finite_diff(|v| sgns_triple_loss(v, &cp, &cn), &x)),
            ("c_pos", &gcp, finite_diff(|v| sgns_triple_loss(&x, v, &cn), &cp)),
            ("c_neg", &gcn, finite_diff(|v| sgns_triple_loss(&x, &cp, v), &cn)),
        ] {
            let gap = relative_gap(analytic, &numeric);
            if gap > GRAD_TOL {
                fail(7, &format!("sgns grad wrt {label} trial {trial}: rel err {gap:.2e}"));
            }
        }

        let (gu, gv, gw) = line_sample_grad(&x, &cp, &cn);
        for (label, analytic, numeric) in [
            ("u", &gu, finite_diff(|v| line_sample_loss(v, &cp, &cn), &x)),
            ("v", &gv, finite_diff(|v| line_sample_loss(&x, v, &cn), &cp)),
            ("w", &gw, finite_diff(|v| line_sample_loss(&x, &cp, v), &cn)),
        ] {
            let gap = relative_gap(analytic, &numeric);
            if gap > GRAD_TOL {
                fail(7, &format!("line grad wrt {label} trial {trial}: rel err {gap:.2e}"));
            }
        }
    }

    // Logistic regression: gradient in (w, b) jointly.
    let rows = 12;
    let cols = 3;
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let x = Features::new(cols, data);
    let y: Vec<bool> = (0..rows).map(|i| i % 3 != 0).collect();
    let lambda = 0.37;
    let w: Vec<f64> = (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = 0.4;
    let (gw, gb) = lr_gradient(&x, &y, lambda, &w, b);
    let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
    let packed: Vec<f64> = w.iter().copied().chain([b]).collect();
    let numeric = finite_diff(
        |v| lr_objective(&x, &y, lambda, &v[..cols], v[cols]),
        &packed,
    );
    let gap = relative_gap(&analytic, &numeric);
    if gap > GRAD_TOL {
        fail(7, &format!("lr gradient: rel err {gap:.2e}"));
    }

    // (d) Laplacian eigenmaps against a dense decomposition (n <= 500).
    for (n, extra, seed, d) in [(60usize, 90usize, 1u64, 4usize), (220, 320, 2, 8), (460, 600, 3, 6)]
    {
        let g = gen::random_connected(n, extra, seed);
        let (vals, emb) = le_eigenpairs(&g, d)
            .unwrap_or_else(|err| fail(7, &format!("le n={n}: {err}")));

        // Dense symmetric normalized Laplacian.
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
            for &j in g.neighbors(i).unwrap() {
                m[(i, j)] =
                    -1.0 / ((g.degree(i) as f64).sqrt() * (g.degree(j) as f64).sqrt());
            }
        }
        let mut dense: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        dense.sort_unstable_by(f64::total_cmp);
        for k in 0..d {
            let want = dense[k + 1]; // skip the trivial zero eigenvalue
            if (vals[k] - want).abs() > 1e-8 {
                fail(
                    7,
                    &format!("le n={n}: eigenvalue {k} = {}, dense oracle {want}", vals[k]),
                );
            }
        }
        // Column k of the embedding must satisfy the generalized residual.
        for k in 0..d {
            let y: Vec<f64> = (0..n).map(|i| emb.row(i)[k]).collect();
            let mut res = 0.0;
            let mut norm = 0.0;
            for i in 0..n {
                let deg = g.degree(i) as f64;
                let ly =
                    deg * y[i] - g.neighbors(i).unwrap().iter().map(|&j| y[j]).sum::<f64>();
                res += (ly - vals[k] * deg * y[i]).powi(2);
                norm += y[i] * y[i];
            }
            let rel = (res / norm).sqrt();
            if rel > 1e-6 {
                fail(7, &format!("le n={n}: column {k} residual {rel:.2e}"));
            }
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 60.0 {
        fail(7, &format!("oracle suite took {elapsed:.1}s, budget 60s"));
    }
    pass(
        7,
        &format!(
            "auc, heuristics, sgns/line/lr gradients, and eigenmaps match their \
             oracles in {elapsed:.1}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: classifier choice
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_classifier_effects() {
    const LR_LRCV_TOL: f64 = 0.01;
    let dir = tempfile::tempdir().unwrap();

    // Two synthetic graphs sized so the finding is measurable: a four-block
    // community graph where pairwise features are informative, and a
    // tripartite entity-item-group graph where neighborhood overlap is
    // misleading. Both are above the dense eigensolver cutoff.
    let sbm = gen::sbm(&[140; 4], 0.15, 0.004, 1);
    let relational = gen::relational(440, 80, 12, 4, 2);
    let sbm_path = dir.path().join("community.edges");
    let rel_path = dir.path().join("relational.edges");
    sbm.write_edge_list_path(&sbm_path).unwrap();
    relational.write_edge_list_path(&rel_path).unwrap();

    let methods = || -> Vec<MethodConfig> {
        vec![
            MethodConfig::new("ne_heuristics", MethodSpec::NeHeuristics),
            MethodConfig::new("gf", MethodSpec::gf_default()),
            MethodConfig::new("le", MethodSpec::Le),
            MethodConfig::new("node2vec", MethodSpec::node2vec_default()),
            MethodConfig::new("line", MethodSpec::line_default()),
        ]
    };
    let classifier = |kind: ClassifierKind| ClassifierConfig {
        kind,
        folds: 10,
        ..ClassifierConfig::default()
    };

    let mut tasks = Vec::new();
    for kind in [ClassifierKind::Lr, ClassifierKind::Lrcv, ClassifierKind::Dt] {
        for (name, path) in [("community", &sbm_path), ("relational", &rel_path)] {
            for method in methods() {
                let mut task = EvalTask::new(dataset(name, path.clone()), method);
                task.d = 16;
                task.classifier = classifier(kind);
                tasks.push(task);
            }
        }
    }

    let store = ResultsStore::open_dir(&dir.path().join("store")).unwrap();
    let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(4);
    let records =
        pipeline::run_all(&tasks, &std::sync::Mutex::new(store), jobs, |_, _, _| {});

    // auc[(classifier, method, dataset)] = mean test AUC over repeats.
    let mut auc: HashMap<(String, String, String), f64> = HashMap::new();
    for (task, record) in tasks.iter().zip(records) {
        let record = match record {
            Ok(r) if r.is_complete() => r,
            Ok(r) => fail(8, &format!("task {} incomplete: {:?}", r.task_id, r.failures)),
            Err(err) => fail(8, &format!("task {} failed: {err}", task.id())),
        };
        auc.insert(
            (
                task.classifier.kind.as_str().to_string(),
                task.method.name.clone(),
                task.dataset.name.clone(),
            ),
            record.mean_auc,
        );
    }
    let pooled = |kind: &str, method: &str| -> f64 {
        (auc[&(kind.into(), method.into(), "community".into())]
            + auc[&(kind.into(), method.into(), "relational".into())])
            / 2.0
    };
    let names = ["ne_heuristics", "gf", "le", "node2vec", "line"];

    // Plain and cross-validated logistic regression are interchangeable for
    // every method run.
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for method in names {
        let gap = (pooled("LR", method) - pooled("LRCV", method)).abs();
        summary.push(format!("{method} |LR-LRCV|={gap:.4}"));
        if gap >= LR_LRCV_TOL {
            problems.push(format!("{method}: |AUC(LR) - AUC(LRCV)| = {gap:.4} >= {LR_LRCV_TOL}"));
        }
    }

    // Decision trees hurt random-walk features but not spectral ones, judged
    // on the community graph where every feature family is informative.
    let reduction = |method: &str| -> f64 {
        auc[&("LRCV".into(), method.into(), "community".into())]
            - auc[&("DT".into(), method.into(), "community".into())]
    };
    let node2vec_drop = reduction("node2vec");
    summary.push(format!("DT drop node2vec={node2vec_drop:+.4}"));
    if node2vec_drop <= 0.0 {
        problems.push(format!(
            "decision tree did not reduce node2vec AUC (drop {node2vec_drop:+.4})"
        ));
    }
    let le_drop = reduction("le");
    let max_other_drop = names
        .iter()
        .filter(|&&m| m != "le")
        .map(|m| reduction(m))
        .fold(f64::NEG_INFINITY, f64::max);
    summary.push(format!("DT drop le={le_drop:+.4} vs max other {max_other_drop:+.4}"));
    if le_drop > max_other_drop {
        problems.push(format!(
            "decision tree hurt le features more ({le_drop:+.4}) than any other method \
             (max {max_other_drop:+.4})"
        ));
    }

    if !problems.is_empty() {
        fail(8, &problems.join("; "));
    }
    pass(8, &summary.join(" "));
}

// ---------------------------------------------------------------------------
// Criterion 9: determinism of the shipped config
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_determinism() {
    let root = workspace_root();
    let config = root.join("configs/smoke-lp2.ini");
    if !config.exists() {
        fail(9, &format!("missing shipped config {}", config.display()));
    }

    // Two independent single-worker runs of the same config and seed.
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out_dir = tempfile::tempdir().unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_lpbench"))
            .args(["evaluate", config.to_str().unwrap(), "--jobs", "1"])
            .env("LPBENCH_OUTPUT_DIR", out_dir.path())
            .output()
            .unwrap_or_else(|err| fail(9, &format!("cannot launch binary: {err}")));
        if !status.status.success() {
            fail(
                9,
                &format!("run {run} exited with {:?}: {}", status.status.code(),
                    String::from_utf8_lossy(&status.stderr)),
            );
        }
        let csv = std::fs::read_to_string(out_dir.path().join("results.csv"))
            .unwrap_or_else(|err| fail(9, &format!("run {run} produced no results.csv: {err}")));
        outputs.push(csv);
    }

    // The four rightmost columns are wall-clock stage timings; every
    // result-bearing byte must match between the runs.
    let header: Vec<&str> = pipeline::CSV_HEADER.to_vec();
    assert_eq!(&header[header.len() - 4..], &["split_s", "embed_s", "tune_s", "predict_s"]);
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                fields[..fields.len() - 4].join(",")
            })
            .collect()
    };
    let (a, b) = (strip(&outputs[0]), strip(&outputs[1]));
    if a.len() != b.len() {
        fail(9, &format!("row counts differ: {} vs {}", a.len(), b.len()));
    }
    for (row, (ra, rb)) in a.iter().zip(&b).enumerate() {
        if ra != rb {
            fail(9, &format!("row {row} differs:\n  {ra}\n  {rb}"));
        }
    }

    // The full-scale config must enumerate its tasks without touching data.
    let full = lpbench::config::ExperimentConfig::parse_path(&root.join("configs/benchmark-lp2.ini"))
        .unwrap_or_else(|err| fail(9, &format!("benchmark-lp2.ini does not parse: {err}")));
    let n_tasks = full.tasks().len();
    if n_tasks != 42 {
        fail(9, &format!("benchmark-lp2.ini enumerates {n_tasks} tasks, expected 42"));
    }

    pass(
        9,
        &format!(
            "two single-worker runs agree on all {} result rows; full config \
             enumerates 42 tasks",
            a.len() - 1
        ),
    );
}
