//! Confusion counts, point metrics, and the ranking metrics AUROC / AUPRC.
//!
//! Tie handling is strict in both curves: samples sharing a score form one
//! group that is processed atomically, so no intra-tie ordering is ever
//! consulted. AUROC counts tied positive/negative pairs as half. AUPRC is
//! the average-precision step sum over descending unique thresholds, which
//! reproduces the horizontal-line value `P_p` when all scores tie.

use crate::error::{Error, Result};

/// Confusion matrix counts. `fn_` carries a trailing underscore because
/// `fn` is reserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Tallies a confusion matrix from binary label sequences.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(Error::param(
            "y_pred",
            format!("length {} != y_true length {}", y_pred.len(), y_true.len()),
        ));
    }
    let mut c = ConfusionCounts { tp: 0, fp: 0, fn_: 0, tn: 0 };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::param("labels", "values must be 0 or 1"));
        }
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (1, 0) => c.fn_ += 1,
            (0, 0) => c.tn += 1,
            _ => unreachable!(),
        }
    }
    Ok(c)
}

/// The five point metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fpr: f64,
    pub f1: f64,
}

/// Point metrics over real-valued confusion cells (counts or fractions).
///
/// Zero-division convention: precision, recall, fpr, and f1 are defined as
/// 0 whenever their denominator vanishes, so sweeps over extreme ratios
/// stay total instead of emitting NaNs.
pub fn point_metrics_from_cells(tp: f64, fp: f64, fn_: f64, tn: f64) -> PointMetrics {
    let total = tp + fp + fn_ + tn;
    let accuracy = if total > 0.0 { (tp + tn) / total } else { 0.0 };
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    let fpr = if fp + tn > 0.0 { fp / (fp + tn) } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    PointMetrics { accuracy, precision, recall, fpr, f1 }
}

pub fn point_metrics(c: &ConfusionCounts) -> PointMetrics {
    point_metrics_from_cells(c.tp as f64, c.fp as f64, c.fn_ as f64, c.tn as f64)
}

/// Per-sample scores paired with true labels, input to the ranking metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPredictions {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl ScoredPredictions {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::param(
                "scores",
                format!("length {} != label length {}", scores.len(), labels.len()),
            ));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("scores", "scores must be finite"));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::param("labels", "values must be 0 or 1"));
        }
        Ok(ScoredPredictions { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    fn class_sizes(&self, metric: &'static str) -> Result<(usize, usize)> {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        let neg = self.labels.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::UndefinedMetric {
                metric,
                reason: format!("needs both classes, got {pos} positive / {neg} negative"),
            });
        }
        Ok((pos, neg))
    }

    /// Indices sorted by descending score; equal scores stay adjacent.
    fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].partial_cmp(&self.scores[a]).unwrap());
        order
    }
}

/// Area under the ROC curve.
///
/// Computed as the Mann-Whitney statistic via average ranks: the
/// probability that a random positive outscores a random negative, with
/// tied pairs counted half. Equals the trapezoidal area under the
/// tie-grouped ROC curve.
pub fn auroc(sp: &ScoredPredictions) -> Result<f64> {
    let (pos, neg) = sp.class_sizes("AUROC")?;
    let order = {
        let mut order = sp.descending_order();
        order.reverse(); // ascending for rank assignment
        order
    };

    let mut rank_sum_pos = 0.0_f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && sp.scores[order[j]] == sp.scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share the average rank
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if sp.labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }

    let n1 = pos as f64;
    let n0 = neg as f64;
    Ok((rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0))
}

/// Area under the precision-recall curve (average precision).
///
/// Step sum over descending unique score thresholds: each tie group
/// contributes `delta_recall * precision_at_threshold`.
pub fn auprc(sp: &ScoredPredictions) -> Result<f64> {
    let (pos, _neg) = sp.class_sizes("AUPRC")?;
    let order = sp.descending_order();

    let total_pos = pos as f64;
    let mut ap = 0.0_f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = sp.scores[order[i]];
        let tp_before = tp;
        let mut j = i;
        while j < order.len() && sp.scores[order[j]] == threshold {
            if sp.labels[order[j]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        if tp > tp_before {
            let delta_recall = (tp - tp_before) as f64 / total_pos;
            let precision = tp as f64 / (tp + fp) as f64;
            ap += delta_recall * precision;
        }
        i = j;
    }
    Ok(ap)
}

/// The full seven-metric report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fpr: f64,
    pub f1: f64,
    pub auroc: f64,
    pub auprc: f64,
}

impl MetricsReport {
    /// Fixed CSV column order.
    pub const CSV_HEADER: &'static str = "accuracy,precision,recall,fpr,f1,auroc,auprc";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.accuracy, self.precision, self.recall, self.fpr, self.f1, self.auroc, self.auprc
        )
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "accuracy" => Some(self.accuracy),
            "precision" => Some(self.precision),
            "recall" => Some(self.recall),
            "fpr" => Some(self.fpr),
            "f1" => Some(self.f1),
            "auroc" => Some(self.auroc),
            "auprc" => Some(self.auprc),
            _ => None,
        }
    }
}

/// Evaluates predicted labels and scores against true labels.
pub fn evaluate(y_true: &[u8], y_pred: &[u8], scores: &[f64]) -> Result<MetricsReport> {
    let c = confusion(y_true, y_pred)?;
    let point = point_metrics(&c);
    let sp = ScoredPredictions::new(scores.to_vec(), y_true.to_vec())?;
    Ok(MetricsReport {
        accuracy: point.accuracy,
        precision: point.precision,
        recall: point.recall,
        fpr: point.fpr,
        f1: point.f1,
        auroc: auroc(&sp)?,
        auprc: auprc(&sp)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sp(scores: &[f64], labels: &[u8]) -> ScoredPredictions {
        ScoredPredictions::new(scores.to_vec(), labels.to_vec()).unwrap()
    }

    #[test]
    fn confusion_tallies() {
        let c = confusion(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 1, fn_: 1, tn: 1 });
        let c = confusion(&[1, 0, 1], &[1, 0, 1]).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = confusion(&[1, 0, 1], &[0, 1, 0]).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
        assert!(confusion(&[1, 0], &[1]).is_err());
    }

    #[test]
    fn point_metrics_worked_example() {
        // tp=2 fp=1 fn=1 tn=6: accuracy 8/10, precision 2/3, recall 2/3,
        // fpr 1/7, f1 2/3.
        let m = point_metrics(&ConfusionCounts { tp: 2, fp: 1, fn_: 1, tn: 6 });
        assert_abs_diff_eq!(m.accuracy, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.precision, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.recall, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.fpr, 1.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.f1, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn point_metrics_zero_conventions() {
        let m = point_metrics(&ConfusionCounts { tp: 0, fp: 0, fn_: 3, tn: 5 });
        assert_eq!((m.precision, m.f1), (0.0, 0.0));
        let m = point_metrics(&ConfusionCounts { tp: 4, fp: 0, fn_: 0, tn: 6 });
        assert_eq!(
            (m.accuracy, m.precision, m.recall, m.f1, m.fpr),
            (1.0, 1.0, 1.0, 1.0, 0.0)
        );
    }

    #[test]
    fn auroc_known_cases() {
        assert_eq!(auroc(&sp(&[0.9, 0.8, 0.7, 0.6], &[1, 1, 0, 0])).unwrap(), 1.0);
        assert_eq!(auroc(&sp(&[0.9, 0.8, 0.7, 0.6], &[0, 0, 1, 1])).unwrap(), 0.0);
        assert_eq!(auroc(&sp(&[0.5, 0.5, 0.5, 0.5], &[1, 0, 1, 0])).unwrap(), 0.5);
        assert!(auroc(&sp(&[0.1, 0.2], &[1, 1])).is_err());
    }

    #[test]
    fn auprc_known_cases() {
        assert_eq!(auprc(&sp(&[0.9, 0.8, 0.7, 0.6], &[1, 1, 0, 0])).unwrap(), 1.0);
        let v = auprc(&sp(&[0.9, 0.8, 0.7, 0.6], &[0, 0, 1, 1])).unwrap();
        assert_abs_diff_eq!(v, 5.0 / 12.0, epsilon = 1e-15);
        // all tied, half positive: single group with precision P_p
        let v = auprc(&sp(&[0.3, 0.3, 0.3, 0.3], &[1, 0, 0, 1])).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn ranking_metrics_match_reference_values() {
        // Fixture with duplicated scores across classes, checked against
        // scikit-learn 1.5 (average_precision_score / roc_auc_score).
        let scores = [0.1, 0.4, 0.35, 0.8, 0.35, 0.8, 0.5, 0.2];
        let labels = [0, 0, 1, 1, 0, 0, 1, 1];
        let s = sp(&scores, &labels);
        assert_abs_diff_eq!(auroc(&s).unwrap(), 0.5625, epsilon = 1e-12);
        assert_abs_diff_eq!(auprc(&s).unwrap(), 0.5595238095238095, epsilon = 1e-12);
    }

    /// Pairwise-counting brute force for AUROC.
    fn auroc_brute(scores: &[f64], labels: &[u8]) -> f64 {
        let mut wins = 0.0_f64;
        let mut pairs = 0.0_f64;
        for (i, &si) in scores.iter().enumerate() {
            if labels[i] != 1 {
                continue;
            }
            for (j, &sj) in scores.iter().enumerate() {
                if labels[j] != 0 {
                    continue;
                }
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    /// Threshold-enumeration brute force for AUPRC.
    fn auprc_brute(scores: &[f64], labels: &[u8]) -> f64 {
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let total_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
        let mut ap = 0.0;
        let mut prev_tp = 0usize;
        for &t in &thresholds {
            let tp = scores
                .iter()
                .zip(labels)
                .filter(|&(&s, &l)| s >= t && l == 1)
                .count();
            let predicted = scores.iter().filter(|&&s| s >= t).count();
            if tp > prev_tp {
                ap += ((tp - prev_tp) as f64 / total_pos) * (tp as f64 / predicted as f64);
            }
            prev_tp = tp;
        }
        ap
    }

    proptest! {
        #[test]
        fn ranking_metrics_match_brute_force(
            entries in prop::collection::vec((0u8..2, 0usize..6), 2..40)
        ) {
            let alphabet = [0.05, 0.2, 0.35, 0.5, 0.65, 0.8];
            let labels: Vec<u8> = entries.iter().map(|e| e.0).collect();
            let scores: Vec<f64> = entries.iter().map(|e| alphabet[e.1]).collect();
            let pos = labels.iter().filter(|&&l| l == 1).count();
            prop_assume!(pos > 0 && pos < labels.len());
            let s = sp(&scores, &labels);
            prop_assert_eq!(auroc(&s).unwrap(), auroc_brute(&scores, &labels));
            prop_assert_eq!(auprc(&s).unwrap(), auprc_brute(&scores, &labels));
        }

        #[test]
        fn invariant_under_increasing_transform_and_permutation(
            entries in prop::collection::vec((0u8..2, -50i32..50), 3..30),
            rotate in 0usize..30
        ) {
            let labels: Vec<u8> = entries.iter().map(|e| e.0).collect();
            let scores: Vec<f64> = entries.iter().map(|e| e.1 as f64 / 10.0).collect();
            let pos = labels.iter().filter(|&&l| l == 1).count();
            prop_assume!(pos > 0 && pos < labels.len());
            let base = sp(&scores, &labels);

            // strictly increasing transform: 3x + 1, then exp scaled
            let transformed: Vec<f64> = scores.iter().map(|&x| (3.0 * x + 1.0).exp()).collect();
            let t = sp(&transformed, &labels);
            prop_assert_eq!(auroc(&base).unwrap(), auroc(&t).unwrap());
            prop_assert_eq!(auprc(&base).unwrap(), auprc(&t).unwrap());

            // permutation (rotation)
            let k = rotate % labels.len();
            let mut rs = scores.clone();
            let mut rl = labels.clone();
            rs.rotate_left(k);
            rl.rotate_left(k);
            let r = sp(&rs, &rl);
            prop_assert_eq!(auroc(&base).unwrap(), auroc(&r).unwrap());
            prop_assert_eq!(auprc(&base).unwrap(), auprc(&r).unwrap());
        }
    }
}
