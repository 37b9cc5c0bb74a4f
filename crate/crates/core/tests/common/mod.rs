//! Independent reference implementations shared by integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kernelguard::retrieval::{edge_ngrams, shingles, tokenize};

/// Term counts of one field, recomputed from raw text.
fn field_terms(text: &str, shingle_field: bool) -> BTreeMap<String, u32> {
    let tokens = tokenize(text);
    let terms = if shingle_field {
        shingles(&tokens, 2, 3)
    } else {
        edge_ngrams(&tokens, 1, 20)
    };
    let mut m = BTreeMap::new();
    for t in terms {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

/// Scores every document with the like-this formula and sorts the lot.
pub fn brute_force_mlt(docs: &[(String, String)], query: &str, limit: usize) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let mut totals = vec![0.0f64; docs.len()];
    let mut hit = vec![false; docs.len()];
    // Shingles first, then edge grams: each field summed on its own.
    let mut per_field: Vec<Vec<f64>> = Vec::new();
    for shingle_field in [true, false] {
        let doc_terms: Vec<BTreeMap<String, u32>> =
            docs.iter().map(|(_, t)| field_terms(t, shingle_field)).collect();
        let q = field_terms(query, shingle_field);
        let mut weighted: Vec<(f64, String, f64)> = Vec::new();
        for (term, &tf) in &q {
            let df = doc_terms.iter().filter(|d| d.contains_key(term)).count() as f64;
            if df == 0.0 {
                continue;
            }
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            weighted.push((tf as f64 * idf, term.clone(), idf));
        }
        weighted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        weighted.truncate(25);

        let mut scores = vec![0.0f64; docs.len()];
        for (_, term, idf) in &weighted {
            for (i, d) in doc_terms.iter().enumerate() {
                if let Some(&tf) = d.get(term) {
                    let len: u32 = d.values().sum();
                    scores[i] += tf as f64 * idf / (len.max(1) as f64).sqrt();
                    hit[i] = true;
                }
            }
        }
        per_field.push(scores);
    }
    for i in 0..docs.len() {
        totals[i] = per_field[0][i] + per_field[1][i];
    }
    let mut out: Vec<(String, f64)> = docs
        .iter()
        .zip(totals)
        .zip(hit)
        .filter(|((_, s), h)| *h && *s > 0.0)
        .map(|(((id, _), s), _)| (id.clone(), s))
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out.truncate(limit);
    out
}

/// Small code-like vocabulary for random documents.
pub const WORDS: &[&str] = &[
    "int", "i", "return", "if", "x", "null", "foo", "bar_baz", "0", "1", "String", "get", "set", "value",
    "count", "list", "size", "a", "b", "total",
];

pub fn distinct<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}
