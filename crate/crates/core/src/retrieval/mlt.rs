use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::analyze::{length_norm, AnalyzedDocument, Field};
use super::index::IndexSnapshot;

pub const DEFAULT_CANDIDATE_LIMIT: usize = 100;
/// Query terms kept per field.
pub const MAX_QUERY_TERMS: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedDoc {
    pub doc_id: String,
    pub ordinal: u32,
    pub score: f64,
}

/// Retrieval hits, best first, at most `limit` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub entries: Vec<RetrievedDoc>,
    pub limit: usize,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }
}

/// `ln(1 + (n - df + 0.5) / (df + 0.5))`.
pub fn idf(doc_count: usize, df: usize) -> f64 {
    let (n, df) = (doc_count as f64, df as f64);
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// A selected query term and its idf.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTerm {
    pub term: String,
    pub idf: f64,
}

/// Up to [`MAX_QUERY_TERMS`] terms of `field` with the highest query tf·idf;
/// ties go to the lexicographically smaller term. Terms absent from the
/// snapshot are skipped.
pub fn select_terms(snapshot: &IndexSnapshot, query: &AnalyzedDocument, field: Field) -> Vec<QueryTerm> {
    let n = snapshot.doc_count();
    let mut scored: Vec<(f64, &str, f64)> = query
        .terms(field)
        .iter()
        .filter_map(|(term, &tf)| {
            let df = snapshot.doc_freq(field, term);
            (df > 0).then(|| {
                let w = idf(n, df);
                (f64::from(tf) * w, term.as_str(), w)
            })
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored
        .into_iter()
        .take(MAX_QUERY_TERMS)
        .map(|(_, term, idf)| QueryTerm {
            term: term.to_string(),
            idf,
        })
        .collect()
}

/// Documents of `snapshot` textually similar to `query_text`.
///
/// Per field, the selected query terms score each document as
/// Σ tf_doc · idf / sqrt(field length); the two field scores are added. Only
/// documents with a positive score are returned, sorted by score descending
/// and then doc id.
pub fn more_like_this(snapshot: &IndexSnapshot, query_text: &str, limit: usize) -> CandidateSet {
    let query = AnalyzedDocument::new("", query_text);
    let n = snapshot.doc_count();
    let mut field_scores = [vec![0.0f64; n], vec![0.0f64; n]];
    let mut touched = vec![false; n];
    for field in Field::ALL {
        let scores = &mut field_scores[field.slot()];
        for qt in select_terms(snapshot, &query, field) {
            for &(ord, tf) in snapshot.postings(field, &qt.term) {
                let len = snapshot.doc(ord).map_or(0, |d| d.field_len(field));
                scores[ord as usize] += f64::from(tf) * qt.idf / length_norm(len);
                touched[ord as usize] = true;
            }
        }
    }

    let mut entries: Vec<RetrievedDoc> = (0..n)
        .filter(|&i| touched[i])
        .map(|i| RetrievedDoc {
            doc_id: snapshot.docs()[i].doc_id.clone(),
            ordinal: i as u32,
            score: field_scores[0][i] + field_scores[1][i],
        })
        .filter(|e| e.score > 0.0)
        .collect();
    entries.sort_by(|a, b| match b.score.total_cmp(&a.score) {
        Ordering::Equal => a.doc_id.cmp(&b.doc_id),
        o => o,
    });
    entries.truncate(limit);
    CandidateSet { entries, limit }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::retrieval::InvertedIndex;

    fn snapshot(texts: &[&str]) -> IndexSnapshot {
        let mut idx = InvertedIndex::new();
        for (i, t) in texts.iter().enumerate() {
            idx.add(&format!("d{i:03}"), t).unwrap();
        }
        IndexSnapshot::full(Arc::new(idx))
    }

    #[test]
    fn identical_document_ranks_first() {
        let snap = snapshot(&[
            "int total = a + b; return total;",
            "if (x == null) { return; }",
            "String s = name.trim();",
        ]);
        let hits = more_like_this(&snap, "if (x == null) { return; }", 100);
        assert_eq!(hits.entries[0].doc_id, "d001");
    }

    #[test]
    fn no_shared_terms_gives_empty_set() {
        let snap = snapshot(&["alpha beta", "gamma delta"]);
        assert!(more_like_this(&snap, "zzz qqq", 100).is_empty());
        assert!(more_like_this(&IndexSnapshot::empty(), "alpha", 100).is_empty());
    }

    #[test]
    fn limit_is_respected() {
        let texts: Vec<String> = (0..150).map(|i| format!("shared token{i}")).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let hits = more_like_this(&snapshot(&refs), "shared", 100);
        assert_eq!(hits.len(), 100);
        assert_eq!(hits.limit, 100);
        assert!(hits.entries.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn idf_is_positive() {
        assert!(idf(1, 1) > 0.0);
        assert!(idf(10_000, 10_000) > 0.0);
        assert!(idf(10, 1) > idf(10, 5));
    }

    #[test]
    fn at_most_25_terms_per_field() {
        let text: String = (0..60).map(|i| format!("w{i:02} ")).collect();
        let snap = snapshot(&[&text]);
        let q = AnalyzedDocument::new("q", &text);
        assert_eq!(select_terms(&snap, &q, Field::Shingle).len(), MAX_QUERY_TERMS);
        assert_eq!(select_terms(&snap, &q, Field::Edgegram).len(), MAX_QUERY_TERMS);
    }
}
