//! Classification error and detection metrics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{invalid, Error, Result};
use crate::matrix::{argmax, Matrix};
use crate::ridge::RidgeSolution;

/// Fraction of rows whose argmax prediction differs from the argmax label.
pub fn error_rate(predictions: &Matrix, labels: &Matrix) -> Result<f64> {
    if predictions.shape() != labels.shape() {
        return Err(Error::DimensionMismatch {
            context: "error rate shapes",
            expected: labels.rows(),
            found: predictions.rows(),
        });
    }
    if labels.rows() == 0 {
        return Err(invalid("error rate of an empty set"));
    }
    let wrong = predictions
        .row_iter()
        .zip(labels.row_iter())
        .filter(|(f, y)| argmax(f) != argmax(y))
        .count();
    Ok(wrong as f64 / labels.rows() as f64)
}

/// Test error of `model` on `test`, keyed `"error_rate"`.
pub fn evaluate(model: &RidgeSolution, test: &Dataset) -> Result<BTreeMap<String, f64>> {
    let pred = model.predict(test.features())?;
    let mut out = BTreeMap::new();
    out.insert(
        String::from("error_rate"),
        error_rate(&pred, test.labels())?,
    );
    Ok(out)
}

fn check_scores(scores: &[f64], positives: &[bool]) -> Result<()> {
    if scores.len() != positives.len() {
        return Err(Error::DimensionMismatch {
            context: "scores vs ground truth",
            expected: positives.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(invalid("NaN detection score"));
    }
    Ok(())
}

/// F1 of the rule `score >= threshold` against `positives`. Zero when nothing
/// is detected correctly.
pub fn f1_score(scores: &[f64], positives: &[bool], threshold: f64) -> Result<f64> {
    check_scores(scores, positives)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&s, &p) in scores.iter().zip(positives) {
        match (s >= threshold, p) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

/// Area under the ROC curve swept over all thresholds, from flagging nothing
/// to flagging everything, by the trapezoidal rule. Tied scores form a single
/// ROC step.
pub fn auc(scores: &[f64], positives: &[bool]) -> Result<f64> {
    check_scores(scores, positives)?;
    let n_pos = positives.iter().filter(|&&p| p).count();
    let n_neg = positives.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(invalid("AUC needs both positive and negative samples"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if positives[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let tpr = tp as f64 / n_pos as f64;
        let fpr = fp as f64 / n_neg as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    Ok(area)
}

/// `f1_at_zero` and `auc` for a score vector against known positives.
pub fn detection_metrics(scores: &[f64], positives: &[bool]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    out.insert(
        String::from("f1_at_zero"),
        f1_score(scores, positives, 0.0)?,
    );
    out.insert(String::from("auc"), auc(scores, positives)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_have_zero_error() {
        let y = Matrix::identity(4);
        assert_eq!(error_rate(&y, &y).unwrap(), 0.0);
        assert!(error_rate(&Matrix::zeros(0, 2), &Matrix::zeros(0, 2)).is_err());
    }

    #[test]
    fn separating_scores_give_unit_auc() {
        let s = [0.9, 0.8, 0.1, -0.3];
        let p = [true, true, false, false];
        assert_eq!(auc(&s, &p).unwrap(), 1.0);
        assert_eq!(f1_score(&s, &p, 0.5).unwrap(), 1.0);
        let rev = [false, false, true, true];
        assert_eq!(auc(&s, &rev).unwrap(), 0.0);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let s = [1.0; 6];
        let p = [true, false, true, false, false, true];
        assert_eq!(auc(&s, &p).unwrap(), 0.5);
    }

    #[test]
    fn auc_matches_pair_counting() {
        let s = [0.3, 0.1, 0.3, 0.7, -0.2, 0.1, 0.5];
        let p = [true, false, false, true, false, true, false];
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if p[i] && !p[j] {
                    pairs += 1.0;
                    if s[i] > s[j] {
                        wins += 1.0;
                    } else if s[i] == s[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        assert!((auc(&s, &p).unwrap() - wins / pairs).abs() < 1e-15);
    }

    #[test]
    fn f1_without_hits_is_zero() {
        assert_eq!(f1_score(&[-1.0, -2.0], &[true, false], 0.0).unwrap(), 0.0);
        assert!(auc(&[1.0], &[true]).is_err());
    }
}
