use super::Class;
use crate::error::{Error, Result};

/// Unweighted mean of the two per-class F1 scores, as a percentage.
///
/// A class whose precision and recall are both zero (or undefined)
/// contributes an F1 of zero.
pub fn macro_f1(truth: &[Class], pred: &[Class]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch(truth.len(), pred.len()));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let f1 = |class: Class| {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (&t, &p) in truth.iter().zip(pred) {
            match (t == class, p == class) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        let precision = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    };
    Ok(100.0 * (f1(Class::Covid) + f1(Class::NonCovid)) / 2.0)
}

/// Area under the ROC curve with `covid` as the positive class.
///
/// Computed as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties
/// counting one half.
pub fn auc_roc(truth: &[Class], scores: &[f64]) -> Result<f64> {
    if truth.len() != scores.len() {
        return Err(Error::LengthMismatch(truth.len(), scores.len()));
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(bad));
    }
    let n_pos = truth.iter().filter(|&&c| c == Class::Covid).count() as u64;
    let n_neg = truth.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedAuc);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the Mann-Whitney U, kept integral
    let mut u2: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group = &order[i..j];
        let pos = group.iter().filter(|&&k| truth[k] == Class::Covid).count() as u64;
        let neg = group.len() as u64 - pos;
        u2 += pos * (2 * neg_below + neg);
        neg_below += neg;
        i = j;
    }
    Ok(u2 as f64 / (2 * n_pos * n_neg) as f64)
}
