//! Change records, dataset adapters and month-wise cumulative snapshots.

mod clonebench;
mod ingest;
mod record;
mod series;

use thiserror::Error;

use crate::retrieval::RetrievalError;

pub use clonebench::{ingest_clonebench, CloneBench, CloneBenchEntry, CloneTruth, CloneType, PairTruth};
pub use ingest::{ingest_changes, parse_changes_jsonl, parse_method_changes_jsonl, parse_td_csv, InputFormat};
pub use record::{ChangeLabel, ChangeRecord, MethodChange};
pub use series::{
    build_snapshots, read_series, snapshot_for, write_series, SnapshotSeries, SnapshotView, TimePeriod,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("unknown label {label:?} at line {line}")]
    UnknownLabel { line: usize, label: String },
    #[error("duplicate change id {id:?} at line {line}")]
    DuplicateChangeId { line: usize, id: String },
    #[error("change {change_id:?} names {fix_id:?} as its fix, which is not a bug-fixing record")]
    InvalidFixReference { change_id: String, fix_id: String },
    #[error("corpus has no records")]
    EmptyCorpus,
    #[error("records are not sorted by timestamp (record {position} is earlier than its predecessor)")]
    NotSorted { position: usize },
    #[error("snapshots are per project, but records from {first:?} and {other:?} were given")]
    MixedProjects { first: String, other: String },
    #[error("pairs file line {line} references unknown method {method_id:?}")]
    DanglingReference { line: usize, method_id: String },
    #[error("method id {0:?} appears more than once in the clone bench")]
    DuplicateMethodId(String),
    #[error("clone bench: {0}")]
    CloneBench(String),
    #[error(transparent)]
    Index(#[from] RetrievalError),
}

impl CorpusError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
