use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const MIN_SHINGLE: usize = 2;
pub const MAX_SHINGLE: usize = 3;
pub const MIN_GRAM: usize = 1;
pub const MAX_GRAM: usize = 20;

/// Term → occurrence count.
pub type TermCounts = BTreeMap<String, u32>;

/// The two indexed fields of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Shingle,
    Edgegram,
}

impl Field {
    pub const ALL: [Field; 2] = [Field::Shingle, Field::Edgegram];

    pub(crate) fn slot(self) -> usize {
        match self {
            Field::Shingle => 0,
            Field::Edgegram => 1,
        }
    }
}

/// Lowercased maximal runs of alphanumerics and underscores.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Every window of `min..=max` consecutive tokens, space-joined.
pub fn shingles(tokens: &[String], min: usize, max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for start in 0..tokens.len() {
        for size in min.max(1)..=max {
            if start + size > tokens.len() {
                break;
            }
            out.push(tokens[start..start + size].join(" "));
        }
    }
    out
}

/// Prefixes of each token with `min..=max` characters.
pub fn edge_ngrams(tokens: &[String], min: usize, max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for token in tokens {
        let ends: Vec<usize> = token
            .char_indices()
            .map(|(i, c)| i + c.len_utf8())
            .collect();
        for len in min.max(1)..=max.min(ends.len()) {
            out.push(token[..ends[len - 1]].to_string());
        }
    }
    out
}

fn count(terms: Vec<String>) -> TermCounts {
    let mut counts = TermCounts::new();
    for t in terms {
        *counts.entry(t).or_insert(0) += 1;
    }
    counts
}

/// A document run through both analyzers.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedDocument {
    pub doc_id: String,
    pub shingle_terms: TermCounts,
    pub edgegram_terms: TermCounts,
}

impl AnalyzedDocument {
    pub fn new(doc_id: impl Into<String>, text: &str) -> Self {
        let tokens = tokenize(text);
        AnalyzedDocument {
            doc_id: doc_id.into(),
            shingle_terms: count(shingles(&tokens, MIN_SHINGLE, MAX_SHINGLE)),
            edgegram_terms: count(edge_ngrams(&tokens, MIN_GRAM, MAX_GRAM)),
        }
    }

    pub fn terms(&self, field: Field) -> &TermCounts {
        match field {
            Field::Shingle => &self.shingle_terms,
            Field::Edgegram => &self.edgegram_terms,
        }
    }

    /// Number of term occurrences in `field`.
    pub fn field_len(&self, field: Field) -> u32 {
        self.terms(field).values().sum()
    }

    /// `sqrt` of the field length, floored at 1 so it is always positive.
    pub fn length_norm(&self, field: Field) -> f64 {
        length_norm(self.field_len(field))
    }
}

pub(crate) fn length_norm(len: u32) -> f64 {
    f64::from(len.max(1)).sqrt()
}
