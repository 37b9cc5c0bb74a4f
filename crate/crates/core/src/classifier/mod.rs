//! Commit-time classification: textual candidates, kernel re-ranking and a
//! K-NN rule that flags a change when any of its `k` nearest past changes was
//! bug-inducing.

mod report;

use std::fmt;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::AstError;
use crate::corpus::{snapshot_for, ChangeLabel, MethodChange, SnapshotSeries, SnapshotView};
use crate::kernels::{normalize, raw_kernel, KernelConfig, SimilarityScore};
use crate::retrieval::{more_like_this, DEFAULT_CANDIDATE_LIMIT};

pub use report::{render_report, render_report_jsonl};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("change {change_id:?} has no tree: {reason}")]
    MissingAst { change_id: String, reason: AstError },
    #[error("commit payload mixes commits {first:?} and {other:?}")]
    MixedCommit { first: String, other: String },
    #[error("invalid classifier configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    k: usize,
    pub kernel: KernelConfig,
    candidate_limit: usize,
}

impl ClassifierConfig {
    /// Requires `1 <= k <= candidate_limit`.
    pub fn new(k: usize, kernel: KernelConfig, candidate_limit: usize) -> Result<Self, ClassifierError> {
        if k == 0 {
            return Err(ClassifierError::InvalidConfig("k must be at least 1".into()));
        }
        if k > candidate_limit {
            return Err(ClassifierError::InvalidConfig(format!(
                "k ({k}) exceeds the candidate limit ({candidate_limit})"
            )));
        }
        Ok(ClassifierConfig {
            k,
            kernel,
            candidate_limit,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn candidate_limit(&self) -> usize {
        self.candidate_limit
    }

    /// Same settings with a different `k`.
    pub fn with_k(&self, k: usize) -> Result<Self, ClassifierError> {
        Self::new(k, self.kernel, self.candidate_limit)
    }
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            k: 1,
            kernel: KernelConfig::default(),
            candidate_limit: DEFAULT_CANDIDATE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    BugInducing,
    Clean,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Prediction::BugInducing => "bug_inducing",
            Prediction::Clean => "clean",
        })
    }
}

/// A past change retrieved for a query, in kernel order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    pub change_id: String,
    /// 1-based.
    pub rank: usize,
    pub kernel_score: SimilarityScore,
    pub retrieval_score: f64,
    pub label: ChangeLabel,
    pub commit_hash: String,
    pub file_path: String,
    pub method_name: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRef {
    pub change_id: String,
    pub commit_hash: String,
    pub source_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub query_change_id: String,
    pub method_name: String,
    pub file_path: String,
    pub commit_hash: String,
    pub query_source: String,
    pub predicted_label: Prediction,
    /// The `k` used for the decision.
    pub k: usize,
    /// Every kernel-ranked candidate.
    pub matches: Vec<RankedMatch>,
    /// Best-ranked bug-inducing match within the top `k`, if any.
    pub flagged_match: Option<SourceRef>,
    /// Fix paired with `flagged_match`, when the link resolves in the snapshot.
    pub suggested_fix: Option<SourceRef>,
}

impl ClassificationResult {
    pub fn top_k(&self) -> &[RankedMatch] {
        &self.matches[..self.k.min(self.matches.len())]
    }

    pub fn is_risky(&self) -> bool {
        self.predicted_label == Prediction::BugInducing
    }
}

/// Bug-inducing iff any of the first `k` labels is bug-inducing.
pub fn biased_decision<I: IntoIterator<Item = ChangeLabel>>(labels: I, k: usize) -> Prediction {
    if labels.into_iter().take(k).any(|l| l == ChangeLabel::BugInducing) {
        Prediction::BugInducing
    } else {
        Prediction::Clean
    }
}

/// Classifies one change against the records visible in `snapshot`.
///
/// Candidates come from a more-like-this query over the snapshot and are
/// re-ranked by normalized kernel score, then retrieval score, then recency,
/// then change id. Candidates whose tree is unavailable score 0.
pub fn classify(
    query: &MethodChange,
    snapshot: &SnapshotView<'_>,
    cfg: &ClassifierConfig,
) -> Result<ClassificationResult, ClassifierError> {
    let tree = query.resolve_ast().map_err(|reason| ClassifierError::MissingAst {
        change_id: query.change_id.clone(),
        reason,
    })?;
    let tree = tree.as_ref();
    let candidates = more_like_this(&snapshot.index(), &query.source_text, cfg.candidate_limit);

    let kcfg = cfg.kernel;
    let query_self = kcfg.normalize.then(|| raw_kernel(tree, tree, &kcfg));
    let mut scored: Vec<(usize, f64, SimilarityScore)> = candidates
        .entries
        .par_iter()
        .map(|c| {
            let ord = c.ordinal as usize;
            let score = match snapshot.ast(ord) {
                None => SimilarityScore::default(),
                Some(ct) => match query_self {
                    Some(qs) => normalize(raw_kernel(tree, ct, &kcfg), qs, raw_kernel(ct, ct, &kcfg)),
                    None => SimilarityScore::new(raw_kernel(tree, ct, &kcfg)),
                },
            };
            (ord, c.score, score)
        })
        .collect();

    let records = snapshot.records();
    scored.sort_by(|a, b| {
        let (ra, rb) = (&records[a.0], &records[b.0]);
        b.2.total_cmp(&a.2)
            .then_with(|| b.1.total_cmp(&a.1))
            .then_with(|| rb.timestamp.cmp(&ra.timestamp))
            .then_with(|| ra.change_id.cmp(&rb.change_id))
    });

    let matches: Vec<RankedMatch> = scored
        .iter()
        .enumerate()
        .map(|(i, &(ord, retrieval_score, kernel_score))| {
            let r = &records[ord];
            RankedMatch {
                change_id: r.change_id.clone(),
                rank: i + 1,
                kernel_score,
                retrieval_score,
                label: r.label,
                commit_hash: r.commit_hash.clone(),
                file_path: r.file_path.clone(),
                method_name: r.method_name.clone(),
                timestamp: r.timestamp,
            }
        })
        .collect();

    let predicted_label = biased_decision(matches.iter().map(|m| m.label), cfg.k);
    let trigger = scored
        .iter()
        .take(cfg.k)
        .map(|s| &records[s.0])
        .find(|r| r.label == ChangeLabel::BugInducing);
    let flagged_match = trigger.map(|r| SourceRef {
        change_id: r.change_id.clone(),
        commit_hash: r.commit_hash.clone(),
        source_text: r.source_text.clone(),
    });
    let suggested_fix = trigger
        .and_then(|r| r.paired_fix_id.as_deref())
        .and_then(|fix| snapshot.ordinal(fix))
        .map(|ord| {
            let f = &records[ord];
            SourceRef {
                change_id: f.change_id.clone(),
                commit_hash: f.commit_hash.clone(),
                source_text: f.source_text.clone(),
            }
        });

    Ok(ClassificationResult {
        query_change_id: query.change_id.clone(),
        method_name: query.method_name.clone(),
        file_path: query.file_path.clone(),
        commit_hash: query.commit_hash.clone(),
        query_source: query.source_text.clone(),
        predicted_label,
        k: cfg.k,
        matches,
        flagged_match,
        suggested_fix,
    })
}

/// Classifies every method of one commit, each against the history strictly
/// before its timestamp.
pub fn classify_commit(
    methods: &[MethodChange],
    series: &SnapshotSeries,
    cfg: &ClassifierConfig,
) -> Result<Vec<ClassificationResult>, ClassifierError> {
    if let Some(first) = methods.first() {
        if let Some(other) = methods.iter().find(|m| m.commit_hash != first.commit_hash) {
            return Err(ClassifierError::MixedCommit {
                first: first.commit_hash.clone(),
                other: other.commit_hash.clone(),
            });
        }
    }
    methods
        .iter()
        .map(|m| classify(m, &snapshot_for(series, m.timestamp), cfg))
        .collect()
}

/// A commit is risky when any of its methods is predicted bug-inducing.
pub fn is_risky_commit(results: &[ClassificationResult]) -> bool {
    results.iter().any(ClassificationResult::is_risky)
}
