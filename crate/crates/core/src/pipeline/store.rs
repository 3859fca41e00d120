//! Append-only, resumable results store.
//!
//! Every completed repeat is appended to two files that always stay in sync:
//! a CSV with a pinned header (the report artifact downstream tooling reads)
//! and a JSON-lines mirror carrying the same fields plus the repeat seed. On
//! reopen the JSONL file is replayed to learn which (task, repeat) cells are
//! already done, so interrupted experiment runs resume where they left off.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pinned column order of `results.csv`. Changing this breaks downstream
/// consumers; extend the JSONL mirror instead.
pub const CSV_HEADER: [&str; 16] = [
    "dataset",
    "method",
    "setup",
    "strategy",
    "d",
    "f",
    "classifier",
    "repeat",
    "operator",
    "hyperparams",
    "val_auc",
    "test_auc",
    "split_s",
    "embed_s",
    "tune_s",
    "predict_s",
];

/// One completed repeat of one task. String fields that do not apply to the
/// method (operator for heuristics, hyperparameters for parameter-free
/// methods) hold `"-"`; a missing validation AUC (no tuning stage) is `None`
/// and serializes to an empty CSV cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRow {
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
    /// Seed used for this repeat (base seed + repeat). JSONL only.
    pub seed: u64,
}

/// Identity of a (task, repeat) cell. `f` is keyed by its bit pattern so the
/// map lookup is exact rather than float-compared.
pub type RowKey = (String, String, String, String, usize, u64, String, usize);

impl StoredRow {
    pub fn key(&self) -> RowKey {
        (
            self.dataset.clone(),
            self.method.clone(),
            self.setup.clone(),
            self.strategy.clone(),
            self.d,
            self.f.to_bits(),
            self.classifier.clone(),
            self.repeat,
        )
    }

    fn csv_record(&self) -> [String; 16] {
        [
            self.dataset.clone(),
            self.method.clone(),
            self.setup.clone(),
            self.strategy.clone(),
            self.d.to_string(),
            self.f.to_string(),
            self.classifier.clone(),
            self.repeat.to_string(),
            self.operator.clone(),
            self.hyperparams.clone(),
            self.val_auc.map(|v| v.to_string()).unwrap_or_default(),
            self.test_auc.to_string(),
            self.split_s.to_string(),
            self.embed_s.to_string(),
            self.tune_s.to_string(),
            self.predict_s.to_string(),
        ]
    }
}

/// Paired CSV + JSONL writer with an in-memory index of completed cells.
///
/// The JSONL file is the source of truth for resume decisions; the CSV is the
/// human- and report-facing artifact. Both are flushed after every append so
/// a crash loses at most the repeat in flight.
#[derive(Debug)]
pub struct ResultsStore {
    rows: HashMap<RowKey, StoredRow>,
    csv: csv::Writer<File>,
    jsonl: BufWriter<File>,
    csv_path: PathBuf,
    jsonl_path: PathBuf,
}

impl ResultsStore {
    /// Open (or create) `results.csv` and `results.jsonl` inside `dir`.
    pub fn open_dir(dir: &Path) -> Result<ResultsStore> {
        std::fs::create_dir_all(dir)?;
        ResultsStore::open(dir.join("results.csv"), dir.join("results.jsonl"))
    }

    pub fn open(csv_path: PathBuf, jsonl_path: PathBuf) -> Result<ResultsStore> {
        let mut rows = HashMap::new();
        if jsonl_path.exists() {
            let reader = BufReader::new(File::open(&jsonl_path)?);
            for (no, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: StoredRow = serde_json::from_str(&line).map_err(|e| {
                    Error::StoreCorrupt {
                        path: jsonl_path.clone(),
                        msg: format!("line {}: {e}", no + 1),
                    }
                })?;
                rows.insert(row.key(), row);
            }
        }

        let needs_header = match std::fs::metadata(&csv_path) {
            Ok(meta) if meta.len() > 0 => {
                let mut first = String::new();
                BufReader::new(File::open(&csv_path)?).read_line(&mut first)?;
                if first.trim_end() != CSV_HEADER.join(",") {
                    return Err(Error::StoreCorrupt {
                        path: csv_path.clone(),
                        msg: format!("unexpected header {:?}", first.trim_end()),
                    });
                }
                false
            }
            _ => true,
        };
        let csv_file = OpenOptions::new().create(true).append(true).open(&csv_path)?;
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(csv_file);
        if needs_header {
            csv.write_record(CSV_HEADER)?;
            csv.flush()?;
        }
        let jsonl_file = OpenOptions::new().create(true).append(true).open(&jsonl_path)?;
        Ok(ResultsStore {
            rows,
            csv,
            jsonl: BufWriter::new(jsonl_file),
            csv_path,
            jsonl_path,
        })
    }

    pub fn csv_path(&self) -> &Path {
        &self.csv_path
    }

    pub fn jsonl_path(&self) -> &Path {
        &self.jsonl_path
    }

    pub fn get(&self, key: &RowKey) -> Option<&StoredRow> {
        self.rows.get(key)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &StoredRow> {
        self.rows.values()
    }

    /// Append one completed repeat to both files and the index.
    pub fn append(&mut self, row: StoredRow) -> Result<()> {
        self.csv.write_record(row.csv_record())?;
        self.csv.flush()?;
        let json = serde_json::to_string(&row).expect("row serialization cannot fail");
        writeln!(self.jsonl, "{json}")?;
        self.jsonl.flush()?;
        self.rows.insert(row.key(), row);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(repeat: usize, auc: f64) -> StoredRow {
        StoredRow {
            dataset: "toy".into(),
            method: "cn".into(),
            setup: "LP2".into(),
            strategy: "st".into(),
            d: 128,
            f: 0.8,
            classifier: "-".into(),
            repeat,
            operator: "-".into(),
            hyperparams: "-".into(),
            val_auc: None,
            test_auc: auc,
            split_s: 0.01,
            embed_s: 0.0,
            tune_s: 0.0,
            predict_s: 0.02,
            seed: 42 + repeat as u64,
        }
    }

    #[test]
    fn roundtrip_on_reopen() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut store = ResultsStore::open_dir(dir.path()).unwrap();
            store.append(sample_row(0, 0.9)).unwrap();
            store.append(sample_row(1, 0.92)).unwrap();
        }
        let store = ResultsStore::open_dir(dir.path()).unwrap();
        assert_eq!(store.len(), 2);
        let key = sample_row(1, 0.0).key();
        assert_eq!(store.get(&key).unwrap().test_auc, 0.92);
        assert!(store.get(&sample_row(7, 0.0).key()).is_none());
    }

    #[test]
    fn csv_has_pinned_header_and_one_line_per_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultsStore::open_dir(dir.path()).unwrap();
        store.append(sample_row(0, 0.875)).unwrap();
        let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), CSV_HEADER.len());
        assert!(row.starts_with("toy,cn,LP2,st,128,0.8,-,0,-,-,,0.875,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn corrupt_jsonl_is_reported_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("results.jsonl"), "{\"not\": \"a row\"}\n").unwrap();
        let err = ResultsStore::open_dir(dir.path()).unwrap_err();
        match err {
            Error::StoreCorrupt { msg, .. } => assert!(msg.contains("line 1"), "{msg}"),
            other => panic!("expected StoreCorrupt, got {other}"),
        }
    }

    #[test]
    fn foreign_csv_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("results.csv"), "a,b,c\n1,2,3\n").unwrap();
        let err = ResultsStore::open_dir(dir.path()).unwrap_err();
        assert!(matches!(err, Error::StoreCorrupt { .. }), "{err}");
    }

    #[test]
    fn val_auc_roundtrips_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let mut row = sample_row(0, 0.9);
        row.val_auc = Some(0.8125);
        {
            let mut store = ResultsStore::open_dir(dir.path()).unwrap();
            store.append(row.clone()).unwrap();
        }
        let store = ResultsStore::open_dir(dir.path()).unwrap();
        assert_eq!(store.get(&row.key()).unwrap(), &row);
    }
}
