//! `lpbench`: run config-driven link prediction experiments and render
//! reports.
//!
//! Exit codes: 0 on success, 1 when any task (or the report) fails, 2 on
//! configuration errors (unparseable config, missing dataset paths, bad
//! filters). The `LPBENCH_OUTPUT_DIR` environment variable overrides the
//! config's output directory.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};

use lpbench::config::ExperimentConfig;
use lpbench::pipeline::{self, EvalTask, PreparedData, ResultsStore};
use lpbench::report;
use lpbench::split;
use lpbench::Error;

const OUTPUT_DIR_ENV: &str = "LPBENCH_OUTPUT_DIR";

#[derive(Parser)]
#[command(
    name = "lpbench",
    version,
    about = "Link prediction benchmarking: heuristics, graph embeddings, and classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every evaluation task defined in a config file
    Evaluate {
        /// Experiment config (INI)
        config: PathBuf,
        /// Comma-separated key=value filters; keys: dataset, method.
        /// Repeating a key widens the filter (OR); distinct keys narrow (AND)
        #[arg(long)]
        only: Option<String>,
        /// Worker threads. 1 (the default) runs tasks in order and keeps the
        /// results CSV byte-deterministic
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the base seed from the config
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute and save train/test splits without evaluating any method
    Split {
        /// Experiment config (INI)
        config: PathBuf,
    },
    /// Render a results CSV produced by `evaluate`
    Report {
        /// Path to results.csv
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Aligned text table with best-in-family markers and rank summaries
    Table,
    /// Wide CSV of per-dataset mean/std plus the summary columns
    Csv,
    /// CSV matrix of -log10(1 - mean AUC) for plotting
    HeatmapData,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Evaluate { config, only, jobs, seed } => cmd_evaluate(&config, only, jobs, seed),
        Command::Split { config } => cmd_split(&config),
        Command::Report { results, format } => cmd_report(&results, format),
    }
}

fn config_failure(err: &Error) -> ExitCode {
    eprintln!("config error: {err}");
    ExitCode::from(2)
}

#[derive(Default)]
struct Filter {
    datasets: Vec<String>,
    methods: Vec<String>,
}

impl Filter {
    fn parse(text: &str) -> Result<Filter, Error> {
        let mut filter = Filter::default();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part.split_once('=').ok_or_else(|| Error::Config {
                line: None,
                msg: format!("filter {part:?} is not of the form key=value"),
            })?;
            match key.trim() {
                "dataset" => filter.datasets.push(value.trim().to_string()),
                "method" => filter.methods.push(value.trim().to_string()),
                other => {
                    return Err(Error::Config {
                        line: None,
                        msg: format!("unknown filter key {other:?} (expected dataset or method)"),
                    });
                }
            }
        }
        Ok(filter)
    }

    fn matches(&self, task: &EvalTask) -> bool {
        (self.datasets.is_empty() || self.datasets.contains(&task.dataset.name))
            && (self.methods.is_empty() || self.methods.contains(&task.method.name))
    }
}

fn cmd_evaluate(
    config_path: &std::path::Path,
    only: Option<String>,
    jobs: usize,
    seed: Option<u64>,
) -> ExitCode {
    if jobs < 1 {
        eprintln!("config error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let mut config = match ExperimentConfig::parse_path(config_path) {
        Ok(config) => config,
        Err(err) => return config_failure(&err),
    };
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    if let Err(err) = config.validate_paths() {
        return config_failure(&err);
    }
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        config.output_dir = PathBuf::from(dir);
    }

    let mut tasks = config.tasks();
    if let Some(only) = only {
        match Filter::parse(&only) {
            Ok(filter) => tasks.retain(|t| filter.matches(t)),
            Err(err) => return config_failure(&err),
        }
    }
    if tasks.is_empty() {
        eprintln!("warning: no tasks match the given filters; nothing to do");
        return ExitCode::SUCCESS;
    }

    let store = match ResultsStore::open_dir(&config.output_dir) {
        Ok(store) => Mutex::new(store),
        Err(err) => {
            eprintln!("cannot open results store: {err}");
            return ExitCode::from(1);
        }
    };

    let total = tasks.len();
    println!("{total} task(s), {jobs} job(s), output {}", config.output_dir.display());
    let results = pipeline::run_all(&tasks, &store, jobs, |done, task, record| match record {
        Ok(record) if record.is_complete() => {
            println!(
                "[{done}/{total}] {} mean_auc={:.4} std={:.4}",
                record.task_id, record.mean_auc, record.std_auc
            );
        }
        Ok(record) => {
            println!(
                "[{done}/{total}] {} INCOMPLETE: {} of {} repeat(s) finished",
                record.task_id,
                record.rows.len(),
                record.repeats
            );
            for (repeat, message) in &record.failures {
                eprintln!("  repeat {repeat}: {message}");
            }
        }
        Err(err) => {
            println!("[{done}/{total}] {} FAILED", task.id());
            eprintln!("  {err}");
        }
    });

    let failed =
        results.iter().filter(|r| !matches!(r, Ok(record) if record.is_complete())).count();
    if failed == 0 {
        println!(
            "all {total} task(s) complete; results in {}",
            store.lock().expect("store lock").csv_path().display()
        );
        ExitCode::SUCCESS
    } else {
        eprintln!("{failed} of {total} task(s) failed");
        ExitCode::from(1)
    }
}

fn cmd_split(config_path: &std::path::Path) -> ExitCode {
    let config = match ExperimentConfig::parse_path(config_path) {
        Ok(config) => config,
        Err(err) => return config_failure(&err),
    };
    if let Err(err) = config.validate_paths() {
        return config_failure(&err);
    }
    let mut output_dir = config.output_dir.clone();
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        output_dir = PathBuf::from(dir);
    }

    let mut failures = 0usize;
    for dataset in &config.datasets {
        let result = (|| -> Result<(), Error> {
            let data = dataset.load()?;
            let prepared = pipeline::prepare(&data, config.strategy)?;
            for repeat in 0..config.repeats {
                let seed = config.base_seed + repeat as u64;
                let edge_split = match &prepared {
                    PreparedData::Static(g) => {
                        split::make_split(g, config.strategy, config.f, seed, &config.split_cfg)?
                    }
                    PreparedData::Temporal(ts) => {
                        split::make_split_timestamped(ts, config.f, seed, &config.split_cfg)?
                    }
                };
                let dir = output_dir
                    .join("splits")
                    .join(&dataset.name)
                    .join(format!("{}-f{}", config.strategy.as_str(), config.f))
                    .join(format!("repeat{repeat}"));
                split::save_split(&edge_split, &dir)?;
                println!("wrote {}", dir.display());
            }
            Ok(())
        })();
        if let Err(err) = result {
            eprintln!("split failed for dataset {}: {err}", dataset.name);
            failures += 1;
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_report(results_path: &std::path::Path, format: Format) -> ExitCode {
    let rendered = report::read_results_csv(results_path)
        .and_then(|rows| report::aggregate(&rows))
        .map(|table| match format {
            Format::Table => table.render_table(),
            Format::Csv => table.render_csv(),
            Format::HeatmapData => table.render_heatmap_data(),
        });
    match rendered {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("report error: {err}");
            ExitCode::from(1)
        }
    }
}
