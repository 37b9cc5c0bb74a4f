//! Textual candidate retrieval: analyzers, an append-only inverted index and
//! a more-like-this query.

mod analyze;
mod index;
mod mlt;
mod persist;

use thiserror::Error;

pub use analyze::{
    edge_ngrams, shingles, tokenize, AnalyzedDocument, Field, TermCounts, MAX_GRAM, MAX_SHINGLE, MIN_GRAM,
    MIN_SHINGLE,
};
pub use index::{index_add, IndexSnapshot, InvertedIndex, Posting, StoredDoc};
pub use mlt::{
    idf, more_like_this, select_terms, CandidateSet, QueryTerm, RetrievedDoc, DEFAULT_CANDIDATE_LIMIT,
    MAX_QUERY_TERMS,
};
pub use persist::{read_index, write_index, LineReader, MAGIC};

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("document id {0:?} is already indexed")]
    DuplicateDocId(String),
    #[error("index is full")]
    IndexFull,
    #[error("not an index file (expected magic KGIDX1, found {0:?})")]
    BadMagic(String),
    #[error("index file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PartialEq for RetrievalError {
    fn eq(&self, other: &Self) -> bool {
        use RetrievalError::*;
        match (self, other) {
            (DuplicateDocId(a), DuplicateDocId(b)) => a == b,
            (IndexFull, IndexFull) => true,
            (BadMagic(a), BadMagic(b)) => a == b,
            (Format { line: a, message: m }, Format { line: b, message: n }) => a == b && m == n,
            _ => false,
        }
    }
}
