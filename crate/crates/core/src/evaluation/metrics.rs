use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::classifier::Prediction;
use crate::corpus::ChangeLabel;

/// One query's results in system order, each flagged relevant or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<(String, bool)>,
}

impl RankedList {
    pub fn new(query_id: impl Into<String>, entries: Vec<(String, bool)>) -> Self {
        RankedList {
            query_id: query_id.into(),
            entries,
        }
    }

    /// List with synthetic item ids from a relevance pattern.
    pub fn from_relevance(query_id: impl Into<String>, relevance: &[bool]) -> Self {
        let entries = relevance
            .iter()
            .enumerate()
            .map(|(i, &r)| (format!("item{i}"), r))
            .collect();
        Self::new(query_id, entries)
    }

    /// 1-based rank of the first relevant entry.
    pub fn first_relevant(&self) -> Option<usize> {
        self.entries.iter().position(|e| e.1).map(|p| p + 1)
    }
}

fn non_empty<T>(items: &[T]) -> Result<(), EvalError> {
    if items.is_empty() {
        Err(EvalError::EmptyQuerySet)
    } else {
        Ok(())
    }
}

fn check_k(k: usize) -> Result<(), EvalError> {
    if k == 0 {
        Err(EvalError::InvalidK)
    } else {
        Ok(())
    }
}

/// Mean over queries of (relevant entries among the first `k`) / `k`.
pub fn precision_at_k(lists: &[RankedList], k: usize) -> Result<f64, EvalError> {
    non_empty(lists)?;
    check_k(k)?;
    let sum: f64 = lists
        .iter()
        .map(|l| l.entries.iter().take(k).filter(|e| e.1).count() as f64 / k as f64)
        .sum();
    Ok(sum / lists.len() as f64)
}

/// Average precision of one list; relevant items that were never retrieved
/// contribute zero.
pub fn average_precision(list: &RankedList, total_relevant: usize) -> f64 {
    if total_relevant == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, e) in list.entries.iter().enumerate() {
        if e.1 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / total_relevant as f64
}

pub fn mean_average_precision(
    lists: &[RankedList],
    total_relevant: &HashMap<String, usize>,
) -> Result<f64, EvalError> {
    non_empty(lists)?;
    let mut sum = 0.0;
    for l in lists {
        let total = match total_relevant.get(&l.query_id) {
            Some(&t) if t > 0 => t,
            _ => {
                return Err(EvalError::MissingRelevantTotal {
                    query_id: l.query_id.clone(),
                })
            }
        };
        sum += average_precision(l, total);
    }
    Ok(sum / lists.len() as f64)
}

pub fn mean_reciprocal_rank(lists: &[RankedList]) -> Result<f64, EvalError> {
    non_empty(lists)?;
    let sum: f64 = lists
        .iter()
        .map(|l| l.first_relevant().map_or(0.0, |r| 1.0 / r as f64))
        .sum();
    Ok(sum / lists.len() as f64)
}

/// Whether a prediction agrees with the ground truth; bug-fixing changes
/// count as clean.
pub fn prediction_correct(truth: ChangeLabel, predicted: Prediction) -> bool {
    matches!(
        (truth, predicted),
        (ChangeLabel::BugInducing, Prediction::BugInducing) | (ChangeLabel::BugFixing, Prediction::Clean)
    )
}

/// Fraction of queries whose prediction at `k` matches the ground truth.
pub fn topk_accuracy(predictions: &[(ChangeLabel, Prediction)], k: usize) -> Result<f64, EvalError> {
    non_empty(predictions)?;
    check_k(k)?;
    let hits = predictions.iter().filter(|(t, p)| prediction_correct(*t, *p)).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Confusion counts with bug-inducing as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        ConfusionCounts { tp, fp, tn, fn_ }
    }

    pub fn from_predictions(predictions: &[(ChangeLabel, Prediction)]) -> Self {
        let mut c = ConfusionCounts::default();
        for (truth, p) in predictions {
            match (truth, p) {
                (ChangeLabel::BugInducing, Prediction::BugInducing) => c.tp += 1,
                (ChangeLabel::BugFixing, Prediction::BugInducing) => c.fp += 1,
                (ChangeLabel::BugFixing, Prediction::Clean) => c.tn += 1,
                (ChangeLabel::BugInducing, Prediction::Clean) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// `(F-score, accuracy)`. Precision or recall with a zero denominator is 0,
/// as is F when both are 0; all-zero counts give `(0, 0)`.
pub fn f_score_and_accuracy(c: ConfusionCounts) -> (f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = ratio(c.tp, c.tp + c.fp);
    let r = ratio(c.tp, c.tp + c.fn_);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (f, ratio(c.tp + c.tn, c.total()))
}

/// Metrics of one evaluated group. Fields that a harness does not produce
/// are left empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub precision_at_k: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mrr: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub topk_accuracy: BTreeMap<usize, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionCounts>,
    pub query_count: usize,
}

impl MetricsReport {
    /// Every metric value present, for range checks.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.precision_at_k.values().copied().collect();
        v.extend(self.topk_accuracy.values().copied());
        v.extend([self.map, self.mrr, self.f_score, self.accuracy].into_iter().flatten());
        v
    }

    /// Unweighted mean of each metric over `reports` (metrics missing from a
    /// report are averaged over the reports that have them).
    pub fn mean(reports: &[&MetricsReport]) -> MetricsReport {
        fn avg(xs: Vec<f64>) -> Option<f64> {
            (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
        }
        fn avg_map(reports: &[&MetricsReport], pick: fn(&MetricsReport) -> &BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
            let mut keys: Vec<usize> = reports.iter().flat_map(|r| pick(r).keys().copied()).collect();
            keys.sort_unstable();
            keys.dedup();
            keys.into_iter()
                .filter_map(|k| avg(reports.iter().filter_map(|r| pick(r).get(&k).copied()).collect()).map(|v| (k, v)))
                .collect()
        }
        MetricsReport {
            precision_at_k: avg_map(reports, |r| &r.precision_at_k),
            map: avg(reports.iter().filter_map(|r| r.map).collect()),
            mrr: avg(reports.iter().filter_map(|r| r.mrr).collect()),
            topk_accuracy: avg_map(reports, |r| &r.topk_accuracy),
            f_score: avg(reports.iter().filter_map(|r| r.f_score).collect()),
            accuracy: avg(reports.iter().filter_map(|r| r.accuracy).collect()),
            confusion: None,
            query_count: reports.iter().map(|r| r.query_count).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: bool = true;
    const N: bool = false;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn precision_examples() {
        let all = RankedList::from_relevance("q", &[R; 10]);
        assert_eq!(precision_at_k(&[all], 10).unwrap(), 1.0);
        let mixed = RankedList::from_relevance("q", &[R, N, R, N]);
        assert!(close(precision_at_k(std::slice::from_ref(&mixed), 4).unwrap(), 0.5));
        // Short lists keep the k denominator.
        assert!(close(precision_at_k(&[mixed], 8).unwrap(), 0.25));
        assert_eq!(precision_at_k(&[], 1), Err(EvalError::EmptyQuerySet));
        assert_eq!(precision_at_k(&[RankedList::from_relevance("q", &[R])], 0), Err(EvalError::InvalidK));
    }

    #[test]
    fn map_examples() {
        let totals = HashMap::from([("q".to_string(), 2)]);
        let ap = |rel: &[bool]| mean_average_precision(&[RankedList::from_relevance("q", rel)], &totals).unwrap();
        assert!(close(ap(&[R, R]), 1.0));
        assert!(close(ap(&[R, N, R]), (1.0 + 2.0 / 3.0) / 2.0));
        assert!(close(ap(&[R, N, R]), 0.833_333_333_333_333_3));
        // One of two relevant items never retrieved.
        assert!(close(ap(&[R, N]), 0.5));
        assert!(matches!(
            mean_average_precision(&[RankedList::from_relevance("other", &[R])], &totals),
            Err(EvalError::MissingRelevantTotal { .. })
        ));
    }

    #[test]
    fn mrr_examples() {
        let lists = [
            RankedList::from_relevance("a", &[R, N]),
            RankedList::from_relevance("b", &[N, R]),
            RankedList::from_relevance("c", &[N, N, N, R]),
        ];
        assert!(close(mean_reciprocal_rank(&lists).unwrap(), (1.0 + 0.5 + 0.25) / 3.0));
        assert!(close(mean_reciprocal_rank(&lists).unwrap(), 0.583_333_333_333_333_3));
        assert_eq!(mean_reciprocal_rank(&[RankedList::from_relevance("a", &[N, N])]).unwrap(), 0.0);
        assert_eq!(mean_reciprocal_rank(&[RankedList::from_relevance("a", &[R])]).unwrap(), 1.0);
    }

    #[test]
    fn topk_examples() {
        use ChangeLabel::{BugFixing, BugInducing as Bug};
        use Prediction::{BugInducing as Flag, Clean};
        let preds = [(Bug, Flag), (BugFixing, Clean), (BugFixing, Flag), (Bug, Flag)];
        assert!(close(topk_accuracy(&preds, 1).unwrap(), 0.75));
        assert_eq!(topk_accuracy(&preds[..2], 5).unwrap(), 1.0);
        assert_eq!(ConfusionCounts::from_predictions(&preds), ConfusionCounts::new(2, 1, 1, 0));
    }

    #[test]
    fn f_score_examples() {
        assert_eq!(f_score_and_accuracy(ConfusionCounts::new(5, 0, 5, 0)), (1.0, 1.0));
        let (f, acc) = f_score_and_accuracy(ConfusionCounts::new(3, 1, 4, 2));
        // P = 0.75, R = 0.6.
        assert!(close(f, 2.0 * 0.75 * 0.6 / 1.35));
        assert!(close(f, 0.666_666_666_666_666_6));
        assert!(close(acc, 0.7));
        assert_eq!(f_score_and_accuracy(ConfusionCounts::new(0, 0, 3, 2)).0, 0.0);
        assert_eq!(f_score_and_accuracy(ConfusionCounts::default()), (0.0, 0.0));
    }

    #[test]
    fn mean_of_reports() {
        let a = MetricsReport {
            mrr: Some(1.0),
            topk_accuracy: BTreeMap::from([(1, 1.0)]),
            query_count: 3,
            ..Default::default()
        };
        let b = MetricsReport {
            mrr: Some(0.5),
            topk_accuracy: BTreeMap::from([(1, 0.0), (5, 1.0)]),
            query_count: 2,
            ..Default::default()
        };
        let m = MetricsReport::mean(&[&a, &b]);
        assert_eq!(m.mrr, Some(0.75));
        assert_eq!(m.topk_accuracy, BTreeMap::from([(1, 0.5), (5, 1.0)]));
        assert_eq!(m.query_count, 5);
        assert_eq!(m.map, None);
    }
}
