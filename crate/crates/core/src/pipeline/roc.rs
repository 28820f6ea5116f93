use std::collections::HashSet;

use serde::Serialize;

use super::scores::EdgeScoreMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RocResult {
    /// `(false positive rate, true positive rate)`, from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
    /// Number of distinct score levels.
    pub thresholds: usize,
}

/// ROC over all ordered pairs `i != j`, treating `gold` as the positives.
/// Tied scores form a single step, so the trapezoidal area counts a tied
/// positive/negative pair as one half.
pub fn roc_auc(scores: &EdgeScoreMatrix, gold: &[(usize, usize)]) -> Result<RocResult> {
    let p = scores.p();
    let mut positives = HashSet::new();
    for &(i, j) in gold {
        if i >= p || j >= p {
            return Err(Error::InvalidArgument(format!("gold edge ({i}, {j}) out of range for {p} nodes")));
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("gold edge ({i}, {i}) is a self-loop")));
        }
        positives.insert((i, j));
    }
    let n_pos = positives.len();
    let n_neg = p * (p - 1) - n_pos;
    if n_pos == 0 {
        return Err(Error::InvalidArgument("gold standard has no edges".into()));
    }
    if n_neg == 0 {
        return Err(Error::InvalidArgument("gold standard contains every pair; no negatives".into()));
    }

    let mut cands: Vec<(f64, bool)> = Vec::with_capacity(p * (p - 1));
    for i in 0..p {
        for j in 0..p {
            if i != j {
                let s = scores.scores[(i, j)];
                if !s.is_finite() {
                    return Err(Error::NonFinite);
                }
                cands.push((s, positives.contains(&(i, j))));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut k = 0;
    while k < cands.len() {
        let level = cands[k].0;
        let (tp0, fp0) = (tp, fp);
        while k < cands.len() && cands[k].0 == level {
            if cands[k].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        // trapezoid in integer counts, normalized once at the end
        auc += (fp - fp0) as f64 * (tp + tp0) as f64;
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    let thresholds = points.len() - 1;
    Ok(RocResult { points, auc: auc / (2.0 * n_pos as f64 * n_neg as f64), thresholds })
}
