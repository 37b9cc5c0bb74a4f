//! Exhaustive fragment enumeration.
//!
//! Exponential in tree size; used to check the kernel engine on small trees.
//! Fragment families:
//! - STK: every non-leaf node together with its entire descendancy.
//! - SSTK: fragments in which each included node keeps all of its children or
//!   none of them, rooted at a non-leaf node (at least two nodes).
//! - PTK: any node with any ordered subsequence of its children, recursively
//!   (single nodes included).

use std::collections::BTreeMap;

use crate::ast::{serialize_sexpr, NodeId, Tree};

use super::{KernelError, KernelKind};

/// Default node cap for [`oracle_fragments`].
pub const ORACLE_NODE_CAP: usize = 12;

/// Fragment occurrence counts keyed by canonical s-expression.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentMultiset {
    counts: BTreeMap<String, u64>,
}

impl FragmentMultiset {
    pub fn get(&self, fragment: &str) -> u64 {
        self.counts.get(fragment).copied().unwrap_or(0)
    }

    /// Total number of fragment occurrences.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Inner product of the two count vectors.
    pub fn dot(&self, other: &FragmentMultiset) -> u64 {
        self.counts
            .iter()
            .map(|(k, &c)| c * other.get(k))
            .sum()
    }

    fn add(&mut self, fragment: String) {
        *self.counts.entry(fragment).or_insert(0) += 1;
    }
}

/// Enumerates fragments of `tree` with the default node cap.
pub fn oracle_fragments(tree: &Tree, kind: KernelKind) -> Result<FragmentMultiset, KernelError> {
    oracle_fragments_capped(tree, kind, ORACLE_NODE_CAP)
}

pub fn oracle_fragments_capped(
    tree: &Tree,
    kind: KernelKind,
    cap: usize,
) -> Result<FragmentMultiset, KernelError> {
    if tree.node_count() > cap {
        return Err(KernelError::TreeTooLargeForOracle {
            nodes: tree.node_count(),
            cap,
        });
    }
    let mut out = FragmentMultiset::default();
    for id in tree.node_ids() {
        match kind {
            KernelKind::Stk => {
                if !tree.get(id).is_leaf() {
                    out.add(serialize_sexpr(&tree.subtree(id)));
                }
            }
            KernelKind::Sstk => {
                if !tree.get(id).is_leaf() {
                    for f in subset_fragments(tree, id) {
                        out.add(f);
                    }
                }
            }
            KernelKind::Ptk => {
                for f in partial_fragments(tree, id) {
                    out.add(f);
                }
            }
        }
    }
    Ok(out)
}

fn bare(tree: &Tree, id: NodeId) -> String {
    serialize_sexpr(&Tree::leaf(tree.label(id).clone()))
}

/// Wraps child fragment strings under the label of `id`.
fn wrap(tree: &Tree, id: NodeId, inner: &str) -> String {
    let mut s = bare(tree, id);
    s.pop();
    s.push_str(inner);
    s.push(')');
    s
}

/// All concatenations picking one string from each list in order.
fn product(options: &[Vec<String>]) -> Vec<String> {
    let mut acc = vec![String::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                next.push(format!("{prefix}{o}"));
            }
        }
        acc = next;
    }
    acc
}

/// SSTK fragments rooted at the (non-leaf) node `id`: the node is expanded,
/// and every child is either cut off or expanded recursively.
fn subset_fragments(tree: &Tree, id: NodeId) -> Vec<String> {
    let options: Vec<Vec<String>> = tree
        .children(id)
        .iter()
        .map(|&c| {
            let mut opts = vec![bare(tree, c)];
            if !tree.get(c).is_leaf() {
                opts.extend(subset_fragments(tree, c));
            }
            opts
        })
        .collect();
    product(&options)
        .into_iter()
        .map(|inner| wrap(tree, id, &inner))
        .collect()
}

/// PTK fragments rooted at `id`: any ordered subset of children, each child
/// contributing one of its own partial trees.
fn partial_fragments(tree: &Tree, id: NodeId) -> Vec<String> {
    let children = tree.children(id);
    let child_frags: Vec<Vec<String>> = children
        .iter()
        .map(|&c| partial_fragments(tree, c))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << children.len()) {
        let chosen: Vec<Vec<String>> = (0..children.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| child_frags[i].clone())
            .collect();
        for inner in product(&chosen) {
            out.push(wrap(tree, id, &inner));
        }
    }
    out
}
