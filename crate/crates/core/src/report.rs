//! Aggregate results into report tables and plot-ready data.
//!
//! The input is always the pinned `results.csv` produced by the pipeline
//! store. Rows are grouped by (method, dataset); repeats collapse to mean and
//! population standard deviation. Three renderings are offered: an aligned
//! text table (best-in-family markers, average AUC, average rank), a wide CSV
//! of the same aggregates, and a `-log10(1 - AUC)` matrix for heatmap
//! plotting. All three are pure functions of the input file, so identical
//! files render to identical bytes.

use std::collections::HashMap;
use std::path::Path;

use crate::metrics;
use crate::pipeline::CSV_HEADER;
use crate::{Error, Result};

/// One parsed line of `results.csv`.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub dataset: String,
    pub method: String,
    pub setup: String,
    pub strategy: String,
    pub d: usize,
    pub f: f64,
    pub classifier: String,
    pub repeat: usize,
    pub operator: String,
    pub hyperparams: String,
    pub val_auc: Option<f64>,
    pub test_auc: f64,
    pub split_s: f64,
    pub embed_s: f64,
    pub tune_s: f64,
    pub predict_s: f64,
}

/// Read and validate a results CSV produced by the pipeline store.
pub fn read_results_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    {
        let headers = reader.headers()?;
        let expected: Vec<&str> = CSV_HEADER.to_vec();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::StoreCorrupt {
                path: path.to_path_buf(),
                msg: format!("unexpected header {:?}", headers),
            });
        }
    }
    let mut rows = Vec::new();
    for (no, record) in reader.records().enumerate() {
        let record = record?;
        let bad = |what: &str| Error::StoreCorrupt {
            path: path.to_path_buf(),
            msg: format!("data row {}: bad {what} field", no + 1),
        };
        if record.len() != CSV_HEADER.len() {
            return Err(bad("count of"));
        }
        let field = |i: usize| record.get(i).unwrap_or_default();
        rows.push(CsvRow {
            dataset: field(0).to_string(),
            method: field(1).to_string(),
            setup: field(2).to_string(),
            strategy: field(3).to_string(),
            d: field(4).parse().map_err(|_| bad("d"))?,
            f: field(5).parse().map_err(|_| bad("f"))?,
            classifier: field(6).to_string(),
            repeat: field(7).parse().map_err(|_| bad("repeat"))?,
            operator: field(8).to_string(),
            hyperparams: field(9).to_string(),
            val_auc: if field(10).is_empty() {
                None
            } else {
                Some(field(10).parse().map_err(|_| bad("val_auc"))?)
            },
            test_auc: field(11).parse().map_err(|_| bad("test_auc"))?,
            split_s: field(12).parse().map_err(|_| bad("split_s"))?,
            embed_s: field(13).parse().map_err(|_| bad("embed_s"))?,
            tune_s: field(14).parse().map_err(|_| bad("tune_s"))?,
            predict_s: field(15).parse().map_err(|_| bad("predict_s"))?,
        });
    }
    Ok(rows)
}

/// Mean/std of test AUC over the repeats of one (method, dataset) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

/// Methods x datasets aggregate with ranking summaries.
#[derive(Debug, Clone)]
pub struct ReportTable {
    /// Row order: first appearance in the CSV.
    pub methods: Vec<String>,
    /// Column order: first appearance in the CSV.
    pub datasets: Vec<String>,
    /// `cells[mi][di]`; `None` where the method never ran on the dataset.
    pub cells: Vec<Vec<Option<Cell>>>,
    /// Per method: true if it scores pairs directly (no node-pair operator),
    /// i.e. the heuristic-style family; false for embedding-style methods.
    pub direct_score: Vec<bool>,
    /// Mean AUC over the datasets the method ran on.
    pub avg_auc: Vec<f64>,
    /// Mean of per-dataset midranks (rank 1 = best) over datasets present.
    pub avg_rank: Vec<f64>,
    /// `best[mi][di]`: the method ties for the best mean AUC within its
    /// family on that dataset.
    pub best: Vec<Vec<bool>>,
}

/// Collapse raw rows into a [`ReportTable`]. Empty input is an error.
pub fn aggregate(rows: &[CsvRow]) -> Result<ReportTable> {
    if rows.is_empty() {
        return Err(Error::Config { line: None, msg: "results file contains no data rows".into() });
    }
    let mut methods: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    let mut direct_score: Vec<bool> = Vec::new();
    let mut bucket: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for row in rows {
        let mi = match methods.iter().position(|m| *m == row.method) {
            Some(i) => i,
            None => {
                methods.push(row.method.clone());
                direct_score.push(row.operator == "-");
                methods.len() - 1
            }
        };
        let di = match datasets.iter().position(|d| *d == row.dataset) {
            Some(i) => i,
            None => {
                datasets.push(row.dataset.clone());
                datasets.len() - 1
            }
        };
        bucket.entry((mi, di)).or_default().push(row.test_auc);
    }

    let mut cells: Vec<Vec<Option<Cell>>> = vec![vec![None; datasets.len()]; methods.len()];
    for ((mi, di), aucs) in &bucket {
        let n = aucs.len();
        let mean = aucs.iter().sum::<f64>() / n as f64;
        let var = aucs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64;
        cells[*mi][*di] = Some(Cell { n, mean, std: var.sqrt() });
    }

    // Midranks per dataset over the methods present in that column.
    let mut rank: Vec<Vec<Option<f64>>> = vec![vec![None; datasets.len()]; methods.len()];
    for di in 0..datasets.len() {
        let mut present: Vec<(usize, f64)> = (0..methods.len())
            .filter_map(|mi| cells[mi][di].map(|c| (mi, c.mean)))
            .collect();
        present.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut i = 0;
        while i < present.len() {
            let mut j = i;
            while j + 1 < present.len() && present[j + 1].1 == present[i].1 {
                j += 1;
            }
            // Positions i..=j (0-based) share the midrank of ranks i+1..=j+1.
            let mid = (i + j) as f64 / 2.0 + 1.0;
            for &(mi, _) in &present[i..=j] {
                rank[mi][di] = Some(mid);
            }
            i = j + 1;
        }
    }

    // Best mean within each family per dataset; ties all marked.
    let mut best = vec![vec![false; datasets.len()]; methods.len()];
    for di in 0..datasets.len() {
        for family in [true, false] {
            let top = (0..methods.len())
                .filter(|&mi| direct_score[mi] == family)
                .filter_map(|mi| cells[mi][di].map(|c| c.mean))
                .max_by(|a, b| a.total_cmp(b));
            if let Some(top) = top {
                for mi in 0..methods.len() {
                    if direct_score[mi] == family {
                        if let Some(c) = cells[mi][di] {
                            best[mi][di] = c.mean == top;
                        }
                    }
                }
            }
        }
    }

    let mut avg_auc = Vec::with_capacity(methods.len());
    let mut avg_rank = Vec::with_capacity(methods.len());
    for mi in 0..methods.len() {
        let means: Vec<f64> = cells[mi].iter().flatten().map(|c| c.mean).collect();
        avg_auc.push(means.iter().sum::<f64>() / means.len() as f64);
        let ranks: Vec<f64> = rank[mi].iter().flatten().copied().collect();
        avg_rank.push(ranks.iter().sum::<f64>() / ranks.len() as f64);
    }

    Ok(ReportTable { methods, datasets, cells, direct_score, avg_auc, avg_rank, best })
}

fn pad(s: &str, width: usize, right_align: bool) -> String {
    let len = s.chars().count();
    let fill = " ".repeat(width.saturating_sub(len));
    if right_align {
        format!("{fill}{s}")
    } else {
        format!("{s}{fill}")
    }
}

impl ReportTable {
    fn cell_text(&self, mi: usize, di: usize) -> String {
        match self.cells[mi][di] {
            Some(c) => {
                let mark = if self.best[mi][di] { "*" } else { "" };
                format!("{:.3} ± {:.3}{mark}", c.mean, c.std)
            }
            None => "-".to_string(),
        }
    }

    /// Aligned text table: one row per method, one column per dataset, then
    /// average AUC and average rank. `*` marks the best mean within the
    /// method's family for that dataset.
    pub fn render_table(&self) -> String {
        let mut columns: Vec<Vec<String>> = Vec::new();
        let mut head: Vec<String> = vec!["Method".into()];
        head.extend(self.datasets.iter().cloned());
        head.push("Avg AUC".into());
        head.push("Avg Rank".into());

        columns.push(self.methods.clone());
        for di in 0..self.datasets.len() {
            columns.push((0..self.methods.len()).map(|mi| self.cell_text(mi, di)).collect());
        }
        columns.push(self.avg_auc.iter().map(|a| format!("{a:.3}")).collect());
        columns.push(self.avg_rank.iter().map(|r| format!("{r:.2}")).collect());

        let widths: Vec<usize> = columns
            .iter()
            .zip(&head)
            .map(|(col, h)| {
                col.iter()
                    .map(|s| s.chars().count())
                    .chain(std::iter::once(h.chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let mut out = String::new();
        let render_line = |cells: Vec<String>| -> String {
            cells
                .iter()
                .enumerate()
                .map(|(i, s)| pad(s, widths[i], i > 0))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        out.push_str(&render_line(head));
        out.push('\n');
        for mi in 0..self.methods.len() {
            let row: Vec<String> = (0..columns.len()).map(|c| columns[c][mi].clone()).collect();
            out.push_str(&render_line(row));
            out.push('\n');
        }
        out.push_str("* best in its method family (direct-score vs. pair-feature) on that dataset\n");
        out
    }

    /// Wide CSV: per dataset a mean and std column, then the two averages.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("method");
        for ds in &self.datasets {
            out.push_str(&format!(",{ds}_mean,{ds}_std"));
        }
        out.push_str(",avg_auc,avg_rank\n");
        for mi in 0..self.methods.len() {
            out.push_str(&self.methods[mi]);
            for di in 0..self.datasets.len() {
                match self.cells[mi][di] {
                    Some(c) => out.push_str(&format!(",{:.6},{:.6}", c.mean, c.std)),
                    None => out.push_str(",,"),
                }
            }
            out.push_str(&format!(",{:.6},{:.6}\n", self.avg_auc[mi], self.avg_rank[mi]));
        }
        out
    }

    /// CSV matrix of `-log10(1 - mean AUC)` for heatmap plotting. Perfect
    /// scores are capped by the metrics module so every value is finite.
    pub fn render_heatmap_data(&self) -> String {
        let mut out = String::from("method");
        for ds in &self.datasets {
            out.push_str(&format!(",{ds}"));
        }
        out.push('\n');
        for mi in 0..self.methods.len() {
            out.push_str(&self.methods[mi]);
            for di in 0..self.datasets.len() {
                match self.cells[mi][di] {
                    Some(c) => {
                        out.push_str(&format!(",{:.6}", metrics::neg_log_complement(c.mean)));
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}
