use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{
    f_score_and_accuracy, mean_reciprocal_rank, topk_accuracy, ConfusionCounts, MetricsReport, RankedList,
};
use super::EvalError;
use crate::classifier::{biased_decision, classify, ClassificationResult, ClassifierConfig, ClassifierError, Prediction};
use crate::corpus::{build_snapshots, snapshot_for, ChangeLabel, ChangeRecord, SnapshotSeries};

pub const DEFAULT_TOPK: [usize; 2] = [1, 5];

#[derive(Debug, Clone, PartialEq)]
pub struct DefectEvalConfig {
    pub classifier: ClassifierConfig,
    /// The `k` values reported as Top-K accuracy.
    pub topk: Vec<usize>,
    /// Records before this instant only serve as history.
    pub evaluate_from: Option<DateTime<Utc>>,
}

impl DefectEvalConfig {
    pub fn new(classifier: ClassifierConfig) -> Self {
        DefectEvalConfig {
            classifier,
            topk: DEFAULT_TOPK.to_vec(),
            evaluate_from: None,
        }
    }
}

impl Default for DefectEvalConfig {
    fn default() -> Self {
        Self::new(ClassifierConfig::default())
    }
}

/// What happened to one replayed change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub project: String,
    pub change_id: String,
    pub timestamp: DateTime<Utc>,
    pub truth: ChangeLabel,
    /// Prediction for each reported `k` and for the classifier's own `k`.
    pub predictions: BTreeMap<usize, Prediction>,
    /// 1-based rank of the first match sharing the query's label.
    pub first_relevant_rank: Option<usize>,
    pub match_count: usize,
    /// Records consulted for this query (matches and suggested fix) that
    /// are not strictly older than it.
    pub time_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEvalReport {
    pub k: usize,
    pub projects: BTreeMap<String, MetricsReport>,
    /// Unweighted mean over the evaluated projects.
    pub mean: MetricsReport,
    /// Projects left out, with the reason.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub skipped_projects: BTreeMap<String, String>,
    /// Queries whose source had no usable tree.
    pub skipped_queries: usize,
    /// Total count from the time-safety audit; anything but 0 is a bug.
    pub time_violations: usize,
    #[serde(skip)]
    pub outcomes: Vec<QueryOutcome>,
}

/// Replays each project's history in timestamp order, classifying every
/// change against the records strictly older than it.
///
/// Changes with an empty history are predicted clean and still counted.
/// Projects spanning fewer than two monthly periods are skipped.
pub fn run_defect_eval(records: Vec<ChangeRecord>, cfg: &DefectEvalConfig) -> Result<DefectEvalReport, EvalError> {
    if cfg.topk.contains(&0) {
        return Err(EvalError::InvalidK);
    }
    let k_max = cfg.topk.iter().copied().chain([cfg.classifier.k()]).max().unwrap_or(1);
    let wide = cfg.classifier.with_k(k_max)?;

    let mut by_project: BTreeMap<String, Vec<ChangeRecord>> = BTreeMap::new();
    for r in records {
        by_project.entry(r.project.clone()).or_default().push(r);
    }

    let mut report = DefectEvalReport {
        k: cfg.classifier.k(),
        projects: BTreeMap::new(),
        mean: MetricsReport::default(),
        skipped_projects: BTreeMap::new(),
        skipped_queries: 0,
        time_violations: 0,
        outcomes: Vec::new(),
    };
    for (project, mut recs) in by_project {
        recs.sort_by_key(|r| r.timestamp);
        let series = build_snapshots(recs)?;
        if series.periods().len() < 2 {
            log::info!("skipping project {project}: fewer than two time periods");
            report
                .skipped_projects
                .insert(project, "fewer than two time periods".into());
            continue;
        }
        let (outcomes, skipped) = replay(&series, &wide, cfg)?;
        report.skipped_queries += skipped;
        if outcomes.is_empty() {
            report.skipped_projects.insert(project, "no evaluable changes".into());
            continue;
        }
        report.time_violations += outcomes.iter().map(|o| o.time_violations).sum::<usize>();
        report.projects.insert(project, project_metrics(&outcomes, cfg)?);
        report.outcomes.extend(outcomes);
    }
    if report.projects.is_empty() {
        return Err(EvalError::InsufficientHistory);
    }
    report.mean = MetricsReport::mean(&report.projects.values().collect::<Vec<_>>());
    Ok(report)
}

fn replay(
    series: &SnapshotSeries,
    wide: &ClassifierConfig,
    cfg: &DefectEvalConfig,
) -> Result<(Vec<QueryOutcome>, usize), EvalError> {
    let timestamps: HashMap<&str, DateTime<Utc>> =
        series.records().iter().map(|r| (r.change_id.as_str(), r.timestamp)).collect();
    let queries: Vec<&ChangeRecord> = series
        .records()
        .iter()
        .filter(|r| cfg.evaluate_from.is_none_or(|from| r.timestamp >= from))
        .collect();
    let results: Vec<Result<Option<QueryOutcome>, ClassifierError>> = queries
        .par_iter()
        .map(|q| match classify(q, &snapshot_for(series, q.timestamp), wide) {
            Ok(res) => Ok(Some(outcome(q, &res, cfg, &timestamps))),
            Err(ClassifierError::MissingAst { change_id, reason }) => {
                log::warn!("skipping change {change_id}: {reason}");
                Ok(None)
            }
            Err(e) => Err(e),
        })
        .collect();
    let mut outcomes = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(o) => outcomes.push(o),
            None => skipped += 1,
        }
    }
    Ok((outcomes, skipped))
}

fn outcome(
    q: &ChangeRecord,
    res: &ClassificationResult,
    cfg: &DefectEvalConfig,
    timestamps: &HashMap<&str, DateTime<Utc>>,
) -> QueryOutcome {
    let labels = || res.matches.iter().map(|m| m.label);
    let predictions = cfg
        .topk
        .iter()
        .copied()
        .chain([cfg.classifier.k()])
        .map(|k| (k, biased_decision(labels(), k)))
        .collect();
    let consulted = res
        .matches
        .iter()
        .map(|m| m.timestamp)
        .chain(res.suggested_fix.iter().filter_map(|f| timestamps.get(f.change_id.as_str()).copied()));
    QueryOutcome {
        project: q.project.clone(),
        change_id: q.change_id.clone(),
        timestamp: q.timestamp,
        truth: q.label,
        predictions,
        first_relevant_rank: res.matches.iter().position(|m| m.label == q.label).map(|p| p + 1),
        match_count: res.matches.len(),
        time_violations: consulted.filter(|t| *t >= q.timestamp).count(),
    }
}

fn project_metrics(outcomes: &[QueryOutcome], cfg: &DefectEvalConfig) -> Result<MetricsReport, EvalError> {
    let at = |k: usize| -> Vec<(ChangeLabel, Prediction)> {
        outcomes.iter().map(|o| (o.truth, o.predictions[&k])).collect()
    };
    let mut topk = BTreeMap::new();
    for &k in &cfg.topk {
        topk.insert(k, topk_accuracy(&at(k), k)?);
    }
    // Only the first relevant rank matters for reciprocal rank.
    let lists: Vec<RankedList> = outcomes
        .iter()
        .map(|o| {
            let mut rel = vec![false; o.first_relevant_rank.unwrap_or(0)];
            if let Some(last) = rel.last_mut() {
                *last = true;
            }
            RankedList::from_relevance(o.change_id.clone(), &rel)
        })
        .collect();
    let confusion = ConfusionCounts::from_predictions(&at(cfg.classifier.k()));
    let (f, acc) = f_score_and_accuracy(confusion);
    Ok(MetricsReport {
        mrr: Some(mean_reciprocal_rank(&lists)?),
        topk_accuracy: topk,
        f_score: Some(f),
        accuracy: Some(acc),
        confusion: Some(confusion),
        query_count: outcomes.len(),
        ..Default::default()
    })
}
