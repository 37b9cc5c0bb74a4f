//! Convolution tree kernels: subtree (STK), subset tree (SSTK) and partial
//! tree (PTK), with vertical (λ) and horizontal (μ) decay and optional
//! normalization.

mod engine;
mod oracle;
mod rank;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{NodeId, Tree};
use engine::DeltaTable;

pub use oracle::{oracle_fragments, oracle_fragments_capped, FragmentMultiset, ORACLE_NODE_CAP};
pub use rank::{rank_candidates, Candidate, ScoredCandidate};

pub const DEFAULT_LAMBDA: f64 = 0.4;
pub const DEFAULT_MU: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("{name} must lie in (0, 1], got {value}")]
    InvalidDecay { name: &'static str, value: f64 },
    #[error("tree has {nodes} nodes; the fragment oracle accepts at most {cap}")]
    TreeTooLargeForOracle { nodes: usize, cap: usize },
    #[error("unknown kernel kind {0:?} (expected stk, sstk or ptk)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Subtree kernel.
    Stk,
    /// Subset tree kernel.
    Sstk,
    /// Partial tree kernel.
    Ptk,
}

impl KernelKind {
    pub const ALL: [KernelKind; 3] = [KernelKind::Stk, KernelKind::Sstk, KernelKind::Ptk];

    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Stk => "stk",
            KernelKind::Sstk => "sstk",
            KernelKind::Ptk => "ptk",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_uppercase())
    }
}

impl FromStr for KernelKind {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "stk" => Ok(KernelKind::Stk),
            "sstk" => Ok(KernelKind::Sstk),
            "ptk" => Ok(KernelKind::Ptk),
            _ => Err(KernelError::UnknownKind(s.to_string())),
        }
    }
}

/// Kernel family, decay factors and normalization switch.
///
/// `mu` only affects PTK.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    lambda: f64,
    mu: f64,
    pub normalize: bool,
}

impl KernelConfig {
    pub fn new(kind: KernelKind, lambda: f64, mu: f64, normalize: bool) -> Result<Self, KernelError> {
        check_decay("lambda", lambda)?;
        check_decay("mu", mu)?;
        Ok(KernelConfig {
            kind,
            lambda,
            mu,
            normalize,
        })
    }

    /// Default decays, normalized.
    pub fn of(kind: KernelKind) -> Self {
        KernelConfig {
            kind,
            lambda: DEFAULT_LAMBDA,
            mu: DEFAULT_MU,
            normalize: true,
        }
    }

    /// λ = μ = 1, unnormalized: the kernel counts shared fragment pairs.
    pub fn counting(kind: KernelKind) -> Self {
        KernelConfig {
            kind,
            lambda: 1.0,
            mu: 1.0,
            normalize: false,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig::of(KernelKind::Ptk)
    }
}

fn check_decay(name: &'static str, value: f64) -> Result<(), KernelError> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidDecay { name, value })
    }
}

/// Non-negative kernel value. Normalized scores lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Self {
        SimilarityScore(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// Kernel value between two trees.
///
/// Symmetric bit-for-bit: the pair is put into a canonical order before
/// evaluation. With `normalize`, returns K(a,b) / sqrt(K(a,a)·K(b,b)), or 0
/// when either self-kernel is 0.
pub fn kernel(t1: &Tree, t2: &Tree, cfg: &KernelConfig) -> SimilarityScore {
    let raw = raw_kernel(t1, t2, cfg);
    if !cfg.normalize {
        return SimilarityScore::new(raw);
    }
    normalize(raw, raw_kernel(t1, t1, cfg), raw_kernel(t2, t2, cfg))
}

/// Normalized kernel from precomputed raw values.
pub fn normalize(raw: f64, self1: f64, self2: f64) -> SimilarityScore {
    if self1 <= 0.0 || self2 <= 0.0 {
        return SimilarityScore(0.0);
    }
    SimilarityScore::new((raw / (self1.sqrt() * self2.sqrt())).min(1.0))
}

/// Unnormalized kernel value, ignoring `cfg.normalize`.
pub fn raw_kernel(t1: &Tree, t2: &Tree, cfg: &KernelConfig) -> f64 {
    let (a, b) = if t1.structural_cmp(t2) == Ordering::Greater {
        (t2, t1)
    } else {
        (t1, t2)
    };
    DeltaTable::compute(a, b, cfg).total()
}

/// Number of common fragments rooted at `n1` and `n2` under STK, decayed by λ
/// per expanded node: 0 for different productions, otherwise λ times the
/// product of the children's deltas (leaf children count as 1).
pub fn delta_stk(t1: &Tree, n1: NodeId, t2: &Tree, n2: NodeId, lambda: f64) -> f64 {
    let cfg = KernelConfig {
        kind: KernelKind::Stk,
        lambda,
        mu: 1.0,
        normalize: false,
    };
    DeltaTable::compute(t1, t2, &cfg).delta(n1, n2)
}

/// SSTK delta: 0 for different productions, λ for matching pre-terminals,
/// otherwise λ · Π (1 + delta(child pair)).
pub fn delta_sstk(t1: &Tree, n1: NodeId, t2: &Tree, n2: NodeId, lambda: f64) -> f64 {
    let cfg = KernelConfig {
        kind: KernelKind::Sstk,
        lambda,
        mu: 1.0,
        normalize: false,
    };
    DeltaTable::compute(t1, t2, &cfg).delta(n1, n2)
}

/// PTK delta: 0 for different labels, otherwise
/// μ · (λ² + Σ λ^(span(J1)+span(J2)) · Π delta(J1_i, J2_i)) over equal-length
/// ordered child subsequences.
pub fn delta_ptk(t1: &Tree, n1: NodeId, t2: &Tree, n2: NodeId, lambda: f64, mu: f64) -> f64 {
    let cfg = KernelConfig {
        kind: KernelKind::Ptk,
        lambda,
        mu,
        normalize: false,
    };
    DeltaTable::compute(t1, t2, &cfg).delta(n1, n2)
}
