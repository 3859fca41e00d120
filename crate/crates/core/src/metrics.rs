//! Ranking and thresholding metrics.
//!
//! AUC-ROC is computed by the Mann-Whitney rank statistic with midranks for
//! tied scores, in `O(m log m)`; it equals the probability that a random
//! positive outscores a random negative, counting ties as half. The tail
//! transform `-log10(1 - AUC)` spreads the interesting high end; an AUC of
//! exactly 1 maps to the capped sentinel 16 (past any double-precision
//! resolution), which doubles as the "perfect separation" flag.

use crate::{Error, Result};

/// Sentinel for `-log10(1 - AUC)` at AUC = 1.
pub const NEG_LOG_CAP: f64 = 16.0;

fn check_lengths(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { labels: labels.len(), scores: scores.len() });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// AUC-ROC over scores and binary labels. Errors if only one class is
/// present or the lengths differ. Invariant under any strictly increasing
/// transform of the scores; flipping all labels maps `auc` to `1 - auc`.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_lengths(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("scores must not be NaN"));
    // Sum of positive ranks, averaging ranks over tie groups.
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the midrank.
        let midrank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_sum += midrank;
            }
        }
        i = j + 1;
    }
    let auc = (rank_sum - pos as f64 * (pos as f64 + 1.0) / 2.0) / (pos as f64 * neg as f64);
    Ok(auc)
}

/// `-log10(1 - auc)`, capped at [`NEG_LOG_CAP`] when `auc` reaches 1.
/// Expects `auc` in `[0, 1]`.
pub fn neg_log_complement(auc: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&auc), "AUC {auc} outside [0, 1]");
    let tail = 1.0 - auc;
    if tail <= 0.0 {
        return NEG_LOG_CAP;
    }
    (-tail.log10()).min(NEG_LOG_CAP)
}

/// The operating point chosen by accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// Scores strictly above the threshold are predicted positive.
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub accuracy: f64,
}

/// Scan thresholds at midpoints between adjacent distinct scores (plus the
/// two infinities) and return the accuracy-maximizing operating point,
/// breaking ties toward the higher threshold.
pub fn best_accuracy_threshold(scores: &[f64], labels: &[bool]) -> Result<ThresholdReport> {
    let (pos, neg) = check_lengths(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Descending: walking the list lowers the threshold, turning predictions
    // positive group by group.
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("scores must not be NaN"));
    let (pos_f, neg_f, m) = (pos as f64, neg as f64, scores.len() as f64);
    // Threshold +inf: everything negative.
    let mut best = ThresholdReport {
        threshold: f64::INFINITY,
        tpr: 0.0,
        fpr: 0.0,
        accuracy: neg_f / m,
    };
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..=j] {
            if labels[idx] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let threshold = if j + 1 < order.len() {
            (scores[order[i]] + scores[order[j + 1]]) / 2.0
        } else {
            f64::NEG_INFINITY
        };
        let accuracy = (tp as f64 + (neg - fp) as f64) / m;
        // Strict improvement keeps the earlier (higher) threshold on ties.
        if accuracy > best.accuracy {
            best = ThresholdReport {
                threshold,
                tpr: tp as f64 / pos_f,
                fpr: fp as f64 / neg_f,
                accuracy,
            };
        }
        i = j + 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let scores = [0.9, 0.8, 0.2, 0.1];
        let labels = [true, true, false, false];
        assert_eq!(auc_roc(&scores, &labels).unwrap(), 1.0);
        let t = best_accuracy_threshold(&scores, &labels).unwrap();
        assert_eq!(t.accuracy, 1.0);
        assert_eq!(t.tpr, 1.0);
        assert_eq!(t.fpr, 0.0);
        assert_eq!(t.threshold, 0.5);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let scores = [0.3; 6];
        let labels = [true, false, true, false, true, false];
        assert_eq!(auc_roc(&scores, &labels).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_an_error() {
        assert!(matches!(auc_roc(&[0.1, 0.2], &[true, true]), Err(Error::SingleClass)));
        assert!(matches!(
            best_accuracy_threshold(&[0.1, 0.2], &[false, false]),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            auc_roc(&[0.1], &[true, false]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn neg_log_examples() {
        assert!((neg_log_complement(0.9) - 1.0).abs() < 1e-12);
        assert!((neg_log_complement(0.99) - 2.0).abs() < 1e-9);
        assert!((neg_log_complement(0.5) - 0.301_029_995_663_981_2).abs() < 1e-12);
        assert_eq!(neg_log_complement(1.0), NEG_LOG_CAP);
    }

    #[test]
    fn reversed_scores_complement() {
        let scores = [0.9, 0.7, 0.6, 0.4, 0.2];
        let labels = [true, false, true, false, false];
        let auc = auc_roc(&scores, &labels).unwrap();
        let flipped: Vec<bool> = labels.iter().map(|&l| !l).collect();
        let auc_f = auc_roc(&scores, &flipped).unwrap();
        assert!((auc + auc_f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn accuracy_at_least_majority_prior() {
        let scores = [0.1, 0.9, 0.5, 0.51, 0.49];
        let labels = [true, false, false, true, false];
        let t = best_accuracy_threshold(&scores, &labels).unwrap();
        assert!(t.accuracy >= 3.0 / 5.0);
    }
}
