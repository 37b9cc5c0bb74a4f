//! Bottom-up evaluation of the STK, SSTK and PTK recursions.
//!
//! Only node pairs whose keys match can have a non-zero delta: productions
//! (label plus ordered child labels) for STK/SSTK and labels for PTK. Those
//! pairs are found with a sorted join and evaluated children-first, which in
//! the pre-order node layout means descending node index.

use std::collections::HashMap;

use crate::ast::{Label, NodeId, Tree};

use super::{KernelConfig, KernelKind};

const NO_PRODUCTION: u32 = u32::MAX;
/// Largest pair table stored densely; bigger products use a hash map.
const DENSE_LIMIT: usize = 1 << 20;

/// Label and production ids for the nodes of one tree, interned against a
/// table shared with the other tree of the pair.
struct Keys {
    label: Vec<u32>,
    production: Vec<u32>,
}

fn intern_pair<'a>(t1: &'a Tree, t2: &'a Tree) -> (Keys, Keys) {
    let mut labels: HashMap<&'a Label, u32> = HashMap::new();
    let mut productions: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut keys = |t: &'a Tree| -> Keys {
        let label: Vec<u32> = t
            .nodes()
            .iter()
            .map(|n| {
                let next = labels.len() as u32;
                *labels.entry(n.label()).or_insert(next)
            })
            .collect();
        let production = t
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                if n.is_leaf() {
                    return NO_PRODUCTION;
                }
                let mut key = Vec::with_capacity(n.children().len() + 1);
                key.push(label[i]);
                key.extend(n.children().iter().map(|c| label[c.index()]));
                let next = productions.len() as u32;
                *productions.entry(key).or_insert(next)
            })
            .collect();
        Keys { label, production }
    };
    let k1 = keys(t1);
    let k2 = keys(t2);
    (k1, k2)
}

/// Pairs `(n1, n2)` with equal keys, ascending. Nodes keyed `NO_PRODUCTION`
/// are skipped.
fn join(k1: &[u32], k2: &[u32]) -> Vec<(u32, u32)> {
    let sorted = |k: &[u32]| {
        let mut v: Vec<(u32, u32)> = k
            .iter()
            .enumerate()
            .filter(|(_, &key)| key != NO_PRODUCTION)
            .map(|(i, &key)| (key, i as u32))
            .collect();
        v.sort_unstable();
        v
    };
    let (a, b) = (sorted(k1), sorted(k2));
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let key = a[i].0;
                let i_end = a[i..].iter().position(|x| x.0 != key).map_or(a.len(), |p| i + p);
                let j_end = b[j..].iter().position(|x| x.0 != key).map_or(b.len(), |p| j + p);
                for x in &a[i..i_end] {
                    for y in &b[j..j_end] {
                        pairs.push((x.1, y.1));
                    }
                }
                i = i_end;
                j = j_end;
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

enum Table {
    Dense { values: Vec<f64>, cols: usize },
    Sparse(HashMap<u64, f64>),
}

impl Table {
    fn new(rows: usize, cols: usize, pairs: usize) -> Table {
        if rows.saturating_mul(cols) <= DENSE_LIMIT {
            Table::Dense {
                values: vec![0.0; rows * cols],
                cols,
            }
        } else {
            Table::Sparse(HashMap::with_capacity(pairs))
        }
    }

    fn get(&self, a: u32, b: u32) -> f64 {
        match self {
            Table::Dense { values, cols } => values[a as usize * cols + b as usize],
            Table::Sparse(map) => map.get(&(((a as u64) << 32) | b as u64)).copied().unwrap_or(0.0),
        }
    }

    fn set(&mut self, a: u32, b: u32, v: f64) {
        match self {
            Table::Dense { values, cols } => values[a as usize * *cols + b as usize] = v,
            Table::Sparse(map) => {
                map.insert(((a as u64) << 32) | b as u64, v);
            }
        }
    }
}

/// Delta values for every key-matched node pair of two trees.
pub(crate) struct DeltaTable {
    pairs: Vec<(u32, u32)>,
    table: Table,
}

impl DeltaTable {
    pub(crate) fn compute(t1: &Tree, t2: &Tree, cfg: &KernelConfig) -> DeltaTable {
        let (k1, k2) = intern_pair(t1, t2);
        let pairs = match cfg.kind {
            KernelKind::Stk | KernelKind::Sstk => join(&k1.production, &k2.production),
            KernelKind::Ptk => join(&k1.label, &k2.label),
        };
        let mut table = Table::new(t1.node_count(), t2.node_count(), pairs.len());
        let lambda = cfg.lambda();
        let mut dp = Vec::new();

        // Children have larger pre-order indices than their parents.
        for &(a, b) in pairs.iter().rev() {
            let c1 = t1.children(NodeId(a));
            let c2 = t2.children(NodeId(b));
            let delta = match cfg.kind {
                KernelKind::Stk => {
                    let mut prod = lambda;
                    for (x, y) in c1.iter().zip(c2) {
                        if t1.get(*x).is_leaf() && t2.get(*y).is_leaf() {
                            continue;
                        }
                        prod *= table.get(x.0, y.0);
                    }
                    prod
                }
                KernelKind::Sstk => {
                    let mut prod = lambda;
                    for (x, y) in c1.iter().zip(c2) {
                        prod *= 1.0 + table.get(x.0, y.0);
                    }
                    prod
                }
                KernelKind::Ptk => {
                    let sum = ptk_subsequence_sum(c1, c2, &k1.label, &k2.label, &table, lambda, &mut dp);
                    cfg.mu() * (lambda * lambda + sum)
                }
            };
            table.set(a, b, delta);
        }
        DeltaTable { pairs, table }
    }

    pub(crate) fn delta(&self, a: NodeId, b: NodeId) -> f64 {
        self.table.get(a.0, b.0)
    }

    /// Sum of all deltas, in ascending pair order.
    pub(crate) fn total(&self) -> f64 {
        self.pairs.iter().map(|&(a, b)| self.table.get(a, b)).sum()
    }
}

/// Σ over equal-length ordered child subsequences J1, J2 of
/// λ^(span(J1) + span(J2)) · Π delta(J1_i, J2_i), in O(|c1|·|c2|).
///
/// `s[i][j]` is the sum over subsequences ending exactly at children i and j;
/// `d[i][j]` accumulates `s` over the prefix rectangle, each entry decayed by
/// λ per position it lies before (i, j).
fn ptk_subsequence_sum(
    c1: &[NodeId],
    c2: &[NodeId],
    l1: &[u32],
    l2: &[u32],
    table: &Table,
    lambda: f64,
    d: &mut Vec<f64>,
) -> f64 {
    let (n, m) = (c1.len(), c2.len());
    if n == 0 || m == 0 {
        return 0.0;
    }
    let cols = m + 1;
    d.clear();
    d.resize((n + 1) * cols, 0.0);
    let lambda2 = lambda * lambda;
    let mut total = 0.0;
    for i in 1..=n {
        let x = c1[i - 1];
        for j in 1..=m {
            let y = c2[j - 1];
            let s = if l1[x.index()] == l2[y.index()] {
                lambda2 * table.get(x.0, y.0) * (1.0 + d[(i - 1) * cols + (j - 1)])
            } else {
                0.0
            };
            total += s;
            d[i * cols + j] = s + lambda * d[(i - 1) * cols + j] + lambda * d[i * cols + (j - 1)]
                - lambda2 * d[(i - 1) * cols + (j - 1)];
        }
    }
    total
}
