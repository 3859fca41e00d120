//! L2-regularized logistic regression.
//!
//! The objective is mean logistic loss plus `(lambda/2) ||w||^2` (the
//! intercept is fitted but not penalized), minimized by full-batch gradient
//! descent from a zero start with a backtracking (Armijo) line search. The
//! trial step is seeded with a Barzilai-Borwein spectral estimate, which
//! keeps the plain-gradient iteration practical on ill-conditioned pair
//! features; backtracking still enforces monotone descent. Everything is
//! deterministic.
//!
//! The cross-validated variant scores each penalty on stratified held-out
//! folds by AUC-ROC and refits the winner on all rows, breaking ties toward
//! the stronger penalty.

use rand::seq::SliceRandom;

use super::{kv_lookup, sigmoid, Features};
use crate::metrics::auc_roc;
use crate::seeds::{stage_rng, streams};
use crate::{Error, Result};

/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Multiplicative backtracking factor.
const BACKTRACK: f64 = 0.5;

/// A fitted logistic model: `p = sigmoid(w . x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// The penalty the model was fitted with (the selected one for CV fits).
    pub lambda: f64,
}

impl LinearModel {
    pub fn predict_proba(&self, x: &Features) -> Result<Vec<f64>> {
        if x.cols() != self.weights.len() {
            return Err(Error::FeatureDim { got: x.cols(), want: self.weights.len() });
        }
        Ok((0..x.rows())
            .map(|r| {
                let z: f64 =
                    self.weights.iter().zip(x.row(r)).map(|(w, v)| w * v).sum::<f64>() + self.bias;
                sigmoid(z)
            })
            .collect())
    }

    pub fn to_kv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "kind = linear").unwrap();
        writeln!(out, "lambda = {}", self.lambda).unwrap();
        writeln!(out, "bias = {}", self.bias).unwrap();
        writeln!(out, "dim = {}", self.weights.len()).unwrap();
        for (i, w) in self.weights.iter().enumerate() {
            writeln!(out, "w{i} = {w}").unwrap();
        }
        out
    }

    pub fn from_kv(text: &str) -> Result<LinearModel> {
        let parse_f64 = |key: &str| -> Result<f64> {
            kv_lookup(text, key)?
                .parse()
                .map_err(|_| Error::ModelFormat(format!("invalid float for {key:?}")))
        };
        let dim: usize = kv_lookup(text, "dim")?
            .parse()
            .map_err(|_| Error::ModelFormat("invalid dim".into()))?;
        let mut weights = Vec::with_capacity(dim);
        for i in 0..dim {
            weights.push(parse_f64(&format!("w{i}"))?);
        }
        Ok(LinearModel { weights, bias: parse_f64("bias")?, lambda: parse_f64("lambda")? })
    }
}

fn check_xy(x: &Features, y: &[bool]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch { labels: y.len(), scores: x.rows() });
    }
    if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Regularized objective: mean logistic loss + `(lambda/2) ||w||^2`.
///
/// Public so tests can check the analytic gradient against finite
/// differences of this exact function.
pub fn lr_objective(x: &Features, y: &[bool], lambda: f64, w: &[f64], b: f64) -> f64 {
    let m = x.rows() as f64;
    let mut loss = 0.0;
    for r in 0..x.rows() {
        let z: f64 = w.iter().zip(x.row(r)).map(|(wi, v)| wi * v).sum::<f64>() + b;
        let yv = if y[r] { 1.0 } else { 0.0 };
        // Stable form of -[y ln p + (1-y) ln (1-p)].
        loss += z.max(0.0) - z * yv + (-z.abs()).exp().ln_1p();
    }
    loss / m + 0.5 * lambda * w.iter().map(|wi| wi * wi).sum::<f64>()
}

/// Gradient of [`lr_objective`] in `(w, b)`.
pub fn lr_gradient(x: &Features, y: &[bool], lambda: f64, w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let m = x.rows() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for r in 0..x.rows() {
        let z: f64 = w.iter().zip(x.row(r)).map(|(wi, v)| wi * v).sum::<f64>() + b;
        let resid = sigmoid(z) - if y[r] { 1.0 } else { 0.0 };
        for (g, v) in gw.iter_mut().zip(x.row(r)) {
            *g += resid * v;
        }
        gb += resid;
    }
    for (g, wi) in gw.iter_mut().zip(w) {
        *g = *g / m + lambda * wi;
    }
    (gw, gb / m)
}

/// Fit with a fixed penalty. Converges when the gradient norm (including the
/// intercept component) drops to `tol`; exceeding `max_iters` is an error
/// reporting the attained norm. The objective never increases across
/// accepted steps.
pub fn lr_fit(
    x: &Features,
    y: &[bool],
    lambda: f64,
    tol: f64,
    max_iters: usize,
) -> Result<LinearModel> {
    check_xy(x, y)?;
    let d = x.cols();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut obj = lr_objective(x, y, lambda, &w, b);
    let (mut gw, mut gb) = lr_gradient(x, y, lambda, &w, b);
    // Previous parameter/gradient deltas for the Barzilai-Borwein step size.
    let mut prev: Option<(Vec<f64>, f64, Vec<f64>, f64)> = None;
    let mut grad_norm = 0.0;
    for _ in 0..max_iters {
        grad_norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
        if grad_norm <= tol {
            return Ok(LinearModel { weights: w, bias: b, lambda });
        }
        let mut step = match &prev {
            Some((pw, pb, pgw, pgb)) => {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for i in 0..d {
                    let s = w[i] - pw[i];
                    let yv = gw[i] - pgw[i];
                    ss += s * s;
                    sy += s * yv;
                }
                let s = b - pb;
                let yv = gb - pgb;
                ss += s * s;
                sy += s * yv;
                if sy > 0.0 && ss.is_finite() {
                    (ss / sy).clamp(1e-10, 1e10)
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        // Backtrack until Armijo sufficient decrease holds.
        let gsq = grad_norm * grad_norm;
        let (mut nw, mut nb, mut nobj);
        loop {
            nw = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect::<Vec<f64>>();
            nb = b - step * gb;
            nobj = lr_objective(x, y, lambda, &nw, nb);
            if nobj <= obj - ARMIJO_C * step * gsq || step < 1e-18 {
                break;
            }
            step *= BACKTRACK;
        }
        prev = Some((std::mem::take(&mut w), b, std::mem::take(&mut gw), gb));
        w = nw;
        b = nb;
        obj = nobj;
        let g = lr_gradient(x, y, lambda, &w, b);
        gw = g.0;
        gb = g.1;
    }
    Err(Error::LrNotConverged { grad_norm, iters: max_iters, tol })
}

/// Deal row indices into `k` stratified folds: positives and negatives are
/// shuffled separately (seeded) and distributed round-robin, so every fold
/// holds both classes whenever `k` is at most the minority-class count.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = stage_rng(seed, streams::CV_FOLDS);
    let mut pos: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    let mut neg: Vec<usize> = (0..y.len()).filter(|&i| !y[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &r) in pos.iter().chain(neg.iter()).enumerate() {
        folds[i % k].push(r);
    }
    folds
}

/// Cross-validated fit: each `lambda` in the grid is scored by mean held-out
/// AUC over `folds` stratified folds; the best (ties toward the larger
/// penalty) is refitted on all rows.
#[allow(clippy::too_many_arguments)]
pub fn lrcv_fit(
    x: &Features,
    y: &[bool],
    lambda_grid: &[f64],
    folds: usize,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<LinearModel> {
    check_xy(x, y)?;
    assert!(!lambda_grid.is_empty(), "empty lambda grid");
    assert!(folds >= 2, "need at least 2 folds");
    let fold_rows = stratified_folds(y, folds, seed);
    // Precompute per-fold train/val splits once.
    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let val: Vec<usize> = fold_rows[f].clone();
        let train: Vec<usize> =
            (0..folds).filter(|&g| g != f).flat_map(|g| fold_rows[g].iter().copied()).collect();
        let xt = x.subset(&train);
        let yt: Vec<bool> = train.iter().map(|&r| y[r]).collect();
        let xv = x.subset(&val);
        let yv: Vec<bool> = val.iter().map(|&r| y[r]).collect();
        splits.push((xt, yt, xv, yv));
    }
    let mut best: Option<(f64, f64)> = None; // (mean val AUC, lambda)
    for &lambda in lambda_grid {
        let mut sum = 0.0;
        for (xt, yt, xv, yv) in &splits {
            let model = lr_fit(xt, yt, lambda, tol, max_iters)?;
            let scores = model.predict_proba(xv)?;
            sum += auc_roc(&scores, yv)?;
        }
        let mean = sum / folds as f64;
        // >= so later (larger) lambdas win exact ties.
        let take = match best {
            Some((best_auc, best_lambda)) => {
                mean > best_auc || (mean == best_auc && lambda > best_lambda)
            }
            None => true,
        };
        if take {
            best = Some((mean, lambda));
        }
    }
    let (_, lambda) = best.expect("at least one grid point");
    lr_fit(x, y, lambda, tol, max_iters)
}
