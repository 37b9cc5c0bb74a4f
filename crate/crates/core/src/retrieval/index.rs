use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::analyze::{AnalyzedDocument, Field};
use super::RetrievalError;

/// `(document ordinal, term frequency)`.
pub type Posting = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredDoc {
    pub doc_id: String,
    pub text: String,
    pub metadata: BTreeMap<String, String>,
    pub(crate) field_len: [u32; 2],
}

impl StoredDoc {
    pub fn field_len(&self, field: Field) -> u32 {
        self.field_len[field.slot()]
    }
}

/// Append-only inverted index over two analyzer fields.
///
/// Documents get dense ordinals in insertion order and postings lists are
/// kept sorted by ordinal, so any prefix of the insertion order is itself a
/// consistent index (see [`IndexSnapshot`]).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvertedIndex {
    docs: Vec<StoredDoc>,
    ids: HashMap<String, u32>,
    postings: [HashMap<String, Vec<Posting>>; 2],
}

impl InvertedIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, doc_id: &str, text: &str) -> Result<u32, RetrievalError> {
        self.add_with_metadata(doc_id, text, BTreeMap::new())
    }

    pub fn add_with_metadata(
        &mut self,
        doc_id: &str,
        text: &str,
        metadata: BTreeMap<String, String>,
    ) -> Result<u32, RetrievalError> {
        if self.ids.contains_key(doc_id) {
            return Err(RetrievalError::DuplicateDocId(doc_id.to_string()));
        }
        let ord = u32::try_from(self.docs.len()).map_err(|_| RetrievalError::IndexFull)?;
        let analyzed = AnalyzedDocument::new(doc_id, text);
        for field in Field::ALL {
            let map = &mut self.postings[field.slot()];
            for (term, &tf) in analyzed.terms(field) {
                map.entry(term.clone()).or_default().push((ord, tf));
            }
        }
        self.docs.push(StoredDoc {
            doc_id: doc_id.to_string(),
            text: text.to_string(),
            metadata,
            field_len: [
                analyzed.field_len(Field::Shingle),
                analyzed.field_len(Field::Edgegram),
            ],
        });
        self.ids.insert(doc_id.to_string(), ord);
        Ok(ord)
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn doc(&self, ord: u32) -> Option<&StoredDoc> {
        self.docs.get(ord as usize)
    }

    pub fn docs(&self) -> &[StoredDoc] {
        &self.docs
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.ids.get(doc_id).copied()
    }

    pub fn postings(&self, field: Field, term: &str) -> &[Posting] {
        self.postings[field.slot()]
            .get(term)
            .map_or(&[][..], Vec::as_slice)
    }

    pub fn doc_freq(&self, field: Field, term: &str) -> usize {
        self.postings(field, term).len()
    }

    /// Number of distinct terms in `field`.
    pub fn term_count(&self, field: Field) -> usize {
        self.postings[field.slot()].len()
    }

    /// Terms of `field` in lexicographic order with their postings.
    pub fn sorted_terms(&self, field: Field) -> Vec<(&str, &[Posting])> {
        let mut v: Vec<(&str, &[Posting])> = self.postings[field.slot()]
            .iter()
            .map(|(t, p)| (t.as_str(), p.as_slice()))
            .collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn snapshot(self) -> IndexSnapshot {
        IndexSnapshot::full(Arc::new(self))
    }

    pub(crate) fn from_parts(
        docs: Vec<StoredDoc>,
        postings: [HashMap<String, Vec<Posting>>; 2],
    ) -> Result<Self, RetrievalError> {
        let mut ids = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if ids.insert(d.doc_id.clone(), i as u32).is_some() {
                return Err(RetrievalError::DuplicateDocId(d.doc_id.clone()));
            }
        }
        Ok(InvertedIndex { docs, ids, postings })
    }
}

/// Adds `text` under `doc_id`; fails if the id is already present.
pub fn index_add(idx: &mut InvertedIndex, doc_id: &str, text: &str) -> Result<(), RetrievalError> {
    idx.add(doc_id, text).map(|_| ())
}

/// Immutable view of the first `limit` documents of a shared index.
///
/// Cloning is cheap; queries may run concurrently.
#[derive(Debug, Clone)]
pub struct IndexSnapshot {
    index: Arc<InvertedIndex>,
    limit: u32,
}

impl IndexSnapshot {
    pub fn empty() -> Self {
        IndexSnapshot {
            index: Arc::new(InvertedIndex::new()),
            limit: 0,
        }
    }

    pub fn full(index: Arc<InvertedIndex>) -> Self {
        let limit = index.doc_count() as u32;
        IndexSnapshot { index, limit }
    }

    /// The first `limit` documents (clamped to the index size).
    pub fn prefix(index: Arc<InvertedIndex>, limit: usize) -> Self {
        let limit = limit.min(index.doc_count()) as u32;
        IndexSnapshot { index, limit }
    }

    pub fn index(&self) -> &Arc<InvertedIndex> {
        &self.index
    }

    pub fn doc_count(&self) -> usize {
        self.limit as usize
    }

    pub fn is_empty(&self) -> bool {
        self.limit == 0
    }

    pub fn doc(&self, ord: u32) -> Option<&StoredDoc> {
        if ord < self.limit {
            self.index.doc(ord)
        } else {
            None
        }
    }

    pub fn docs(&self) -> &[StoredDoc] {
        &self.index.docs()[..self.limit as usize]
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.index.ordinal(doc_id).filter(|&o| o < self.limit)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.ordinal(doc_id).is_some()
    }

    pub fn postings(&self, field: Field, term: &str) -> &[Posting] {
        let all = self.index.postings(field, term);
        &all[..all.partition_point(|p| p.0 < self.limit)]
    }

    pub fn doc_freq(&self, field: Field, term: &str) -> usize {
        self.postings(field, term).len()
    }
}
