use std::cmp::Ordering;

use rayon::prelude::*;

use crate::ast::Tree;

use super::{kernel, normalize, raw_kernel, KernelConfig, SimilarityScore};

/// A tree to rank against a query. `recency` is any key where larger means
/// more recent (e.g. a Unix timestamp); it only breaks score ties.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub id: &'a str,
    pub tree: &'a Tree,
    pub recency: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub id: String,
    /// 1-based, dense.
    pub rank: usize,
    pub score: SimilarityScore,
}

/// Ranks `candidates` by kernel similarity to `query`.
///
/// Order: higher score, then more recent, then lexicographically smaller id.
/// Scores are computed in parallel; the sort is applied afterwards so the
/// result does not depend on scheduling.
pub fn rank_candidates(
    query: &Tree,
    candidates: &[Candidate<'_>],
    cfg: &KernelConfig,
) -> Vec<ScoredCandidate> {
    let query_self = cfg.normalize.then(|| raw_kernel(query, query, cfg));
    let mut scored: Vec<(usize, SimilarityScore)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let score = match query_self {
                Some(qs) => normalize(raw_kernel(query, c.tree, cfg), qs, raw_kernel(c.tree, c.tree, cfg)),
                None => kernel(query, c.tree, cfg),
            };
            (i, score)
        })
        .collect();

    scored.sort_by(|(i, a), (j, b)| {
        let (ci, cj) = (&candidates[*i], &candidates[*j]);
        b.total_cmp(a)
            .then_with(|| cmp_recency(ci.recency, cj.recency))
            .then_with(|| ci.id.cmp(cj.id))
    });

    scored
        .into_iter()
        .enumerate()
        .map(|(pos, (i, score))| ScoredCandidate {
            id: candidates[i].id.to_string(),
            rank: pos + 1,
            score,
        })
        .collect()
}

/// More recent first; unknown recency sorts last.
fn cmp_recency(a: Option<i64>, b: Option<i64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => y.cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}
