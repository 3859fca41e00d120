//! Node embeddings.
//!
//! Every trainer maps a (train) graph to one d-dimensional real vector per
//! node, indexed by the graph's internal ids. Trainers are single-threaded
//! and deterministic given their seed; task-level parallelism belongs to the
//! pipeline. Submodules:
//!
//! * [`gf`] — graph factorization: SGD on a regularized dot-product
//!   reconstruction of observed edges.
//! * [`le`] — Laplacian eigenmaps: smallest nontrivial generalized
//!   eigenvectors of the graph Laplacian.
//! * [`walks`] + [`sgns`] — second-order biased random walks fed to
//!   skip-gram with negative sampling.
//! * [`line`] — first/second-order proximity by edge-sampling SGD.
//! * [`external`] — adapter running an external embedding program on an
//!   emitted edge list.

pub mod external;
pub mod gf;
pub mod le;
pub mod line;
mod sampling;
pub mod sgns;
pub mod walks;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

/// A dense `n x d` embedding matrix, row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    d: usize,
    data: Vec<f64>,
}

impl Embedding {
    pub fn new(d: usize, data: Vec<f64>) -> Embedding {
        assert!(d > 0 && data.len() % d == 0, "data length must be a multiple of d");
        Embedding { d, data }
    }

    pub fn zeros(n: usize, d: usize) -> Embedding {
        Embedding::new(d, vec![0.0; n * d])
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, node: usize) -> &[f64] {
        &self.data[node * self.d..(node + 1) * self.d]
    }

    #[inline]
    pub fn row_mut(&mut self, node: usize) -> &mut [f64] {
        &mut self.data[node * self.d..(node + 1) * self.d]
    }

    /// Two rows mutably at once (for symmetric SGD updates).
    pub(crate) fn rows_mut2(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert_ne!(a, b);
        let d = self.d;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * d);
            (&mut lo[a * d..(a + 1) * d], &mut hi[..d])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * d);
            let b_row = &mut lo[b * d..(b + 1) * d];
            (&mut hi[..d], b_row)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Concatenate columns of two embeddings over the same nodes.
    pub fn hconcat(&self, other: &Embedding) -> Embedding {
        assert_eq!(self.n(), other.n(), "row counts must match");
        let d = self.d + other.d;
        let mut data = Vec::with_capacity(self.n() * d);
        for i in 0..self.n() {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Embedding::new(d, data)
    }

    /// Write in the conventional text format: a `n d` header line, then one
    /// `node v1 .. vd` line per node, internal ids.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.n(), self.d)?;
        for i in 0..self.n() {
            write!(w, "{i}")?;
            for v in self.row(i) {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_path(&self, path: &Path) -> std::io::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write(&mut out)?;
        out.flush()
    }

    /// Read an embedding for nodes `0..n-1` with expected dimension `d`.
    ///
    /// Accepts an optional `n d` header; rows may appear in any order but
    /// every node must appear exactly once with exactly `d` values.
    pub fn read<R: BufRead>(reader: R, n: usize, d: usize) -> Result<Embedding> {
        let mut data = vec![0.0f64; n * d];
        let mut seen = vec![false; n];
        let mut first_content_line = true;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => &line[..],
            };
            let toks: Vec<&str> = content.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if first_content_line {
                first_content_line = false;
                // Header detection: exactly two integer tokens matching n, d.
                if toks.len() == 2 {
                    if let (Ok(hn), Ok(hd)) = (toks[0].parse::<usize>(), toks[1].parse::<usize>())
                    {
                        if hn == n && hd == d {
                            continue;
                        }
                    }
                }
            }
            let node: usize = toks[0].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid node id {:?}", toks[0]),
            })?;
            if node >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("node id {node} out of range (n = {n})"),
                });
            }
            if toks.len() != d + 1 {
                return Err(Error::ExternalDim { node, got: toks.len() - 1, want: d });
            }
            if seen[node] {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate row for node {node}"),
                });
            }
            seen[node] = true;
            for (k, tok) in toks[1..].iter().enumerate() {
                data[node * d + k] = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid value {tok:?}"),
                })?;
            }
        }
        if let Some(node) = seen.iter().position(|&s| !s) {
            return Err(Error::ExternalMissingNode { node, n });
        }
        Ok(Embedding::new(d, data))
    }

    pub fn read_path(path: &Path, n: usize, d: usize) -> Result<Embedding> {
        Self::read(BufReader::new(File::open(path)?), n, d)
    }
}
