//! Ranking and classification metrics, plus the two evaluation harnesses:
//! clone retrieval over a benchmark and time-aware defect prediction over a
//! change history.

mod clone;
mod defect;
mod metrics;
mod table;

use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::corpus::CorpusError;

pub use clone::{
    run_clone_eval, CloneEvalConfig, CloneEvalReport, CloneScope, DEFAULT_MIN_LINES, DEFAULT_PRECISION_K,
};
pub use defect::{run_defect_eval, DefectEvalConfig, DefectEvalReport, QueryOutcome, DEFAULT_TOPK};
pub use metrics::{
    average_precision, f_score_and_accuracy, mean_average_precision, mean_reciprocal_rank, precision_at_k,
    prediction_correct, topk_accuracy, ConfusionCounts, MetricsReport, RankedList,
};
pub use table::{clone_table, defect_table};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no queries to evaluate")]
    EmptyQuerySet,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no positive relevant-item total for query {query_id:?}")]
    MissingRelevantTotal { query_id: String },
    #[error("at least 2 entries are needed in scope, found {available}")]
    InsufficientEntries { available: usize },
    #[error("no project spans at least two time periods")]
    InsufficientHistory,
    #[error("{0}")]
    InvalidOption(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

impl PartialEq for EvalError {
    fn eq(&self, other: &Self) -> bool {
        use EvalError::*;
        match (self, other) {
            (EmptyQuerySet, EmptyQuerySet) | (InvalidK, InvalidK) | (InsufficientHistory, InsufficientHistory) => true,
            (MissingRelevantTotal { query_id: a }, MissingRelevantTotal { query_id: b }) => a == b,
            (InsufficientEntries { available: a }, InsufficientEntries { available: b }) => a == b,
            (InvalidOption(a), InvalidOption(b)) => a == b,
            (Classifier(a), Classifier(b)) => a == b,
            (Corpus(a), Corpus(b)) => a.to_string() == b.to_string(),
            _ => false,
        }
    }
}
