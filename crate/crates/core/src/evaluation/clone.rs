use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mean_average_precision, precision_at_k, MetricsReport, RankedList};
use super::EvalError;
use crate::ast::{parse_method, Tree};
use crate::corpus::{CloneBench, CloneBenchEntry, CloneType};
use crate::kernels::{normalize, raw_kernel, KernelConfig, SimilarityScore};

pub const DEFAULT_MIN_LINES: usize = 6;
pub const DEFAULT_PRECISION_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloneScope {
    /// Queries ranked against the rest of their functionality.
    InterProjectByFunctionality,
    /// Queries ranked against every other entry of the same project.
    IntraProject,
    /// One group per clone type, with a minimum entry size.
    ByCloneType,
}

impl CloneScope {
    pub fn as_str(self) -> &'static str {
        match self {
            CloneScope::InterProjectByFunctionality => "functionality",
            CloneScope::IntraProject => "project",
            CloneScope::ByCloneType => "clone-type",
        }
    }
}

impl fmt::Display for CloneScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneScope {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "functionality" | "inter-project" | "inter" => Ok(CloneScope::InterProjectByFunctionality),
            "project" | "intra-project" | "intra" => Ok(CloneScope::IntraProject),
            "clone-type" | "type" | "types" => Ok(CloneScope::ByCloneType),
            _ => Err(EvalError::InvalidOption(format!("unknown clone scope {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloneEvalConfig {
    pub kernel: KernelConfig,
    pub scope: CloneScope,
    /// Entries shorter than this are ignored. Only applied in the
    /// clone-type scope.
    pub min_lines: usize,
    /// Clone types evaluated in the clone-type scope.
    pub types: Vec<CloneType>,
    pub precision_k: usize,
}

impl CloneEvalConfig {
    pub fn new(kernel: KernelConfig, scope: CloneScope) -> Self {
        CloneEvalConfig {
            kernel,
            scope,
            min_lines: DEFAULT_MIN_LINES,
            types: vec![CloneType::T1, CloneType::T2, CloneType::Vst3, CloneType::St3],
            precision_k: DEFAULT_PRECISION_K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneEvalReport {
    pub scope: CloneScope,
    pub kernel: String,
    pub precision_k: usize,
    /// Keyed by functionality id, project name or clone type.
    pub groups: BTreeMap<String, MetricsReport>,
    /// Metrics over all evaluated queries together.
    pub overall: MetricsReport,
    /// Entries whose source could not be turned into a tree.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unparsed: Vec<String>,
}

struct Prepared<'a> {
    entry: &'a CloneBenchEntry,
    tree: Tree,
    self_score: f64,
}

/// One evaluation group: each query with the candidates it is ranked
/// against. With `clone_type` set, only true pairs of that type count as
/// relevant.
struct Group {
    key: String,
    queries: Vec<(usize, Vec<usize>)>,
    clone_type: Option<CloneType>,
}

/// Ranks the in-scope entries for every query and reports Precision@k and
/// MAP per group. Ties in kernel score fall back to method id order.
pub fn run_clone_eval(bench: &CloneBench, cfg: &CloneEvalConfig) -> Result<CloneEvalReport, EvalError> {
    if cfg.precision_k == 0 {
        return Err(EvalError::InvalidK);
    }
    let kcfg = cfg.kernel;
    let mut unparsed = Vec::new();
    let mut prepared: Vec<Prepared<'_>> = Vec::with_capacity(bench.entries.len());
    for entry in &bench.entries {
        if cfg.scope == CloneScope::ByCloneType && entry.line_count < cfg.min_lines {
            continue;
        }
        let tree = match &entry.ast {
            Some(t) => t.clone(),
            None => match parse_method(&entry.source_text) {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("skipping clone entry {}: {e}", entry.method_id);
                    unparsed.push(entry.method_id.clone());
                    continue;
                }
            },
        };
        prepared.push(Prepared { entry, tree, self_score: 0.0 });
    }
    prepared.par_iter_mut().for_each(|p| p.self_score = raw_kernel(&p.tree, &p.tree, &kcfg));

    let groups = build_groups(bench, cfg, &prepared)?;

    let mut report_groups = BTreeMap::new();
    let mut all_lists = Vec::new();
    let mut all_totals = HashMap::new();
    for g in &groups {
        let (lists, totals) = rank_group(g, bench, &prepared, &kcfg);
        if lists.is_empty() {
            continue;
        }
        report_groups.insert(g.key.clone(), clone_metrics(&lists, &totals, cfg.precision_k)?);
        for l in &lists {
            // Query ids can repeat across clone-type groups.
            let id = format!("{}#{}", g.key, l.query_id);
            all_totals.insert(id.clone(), totals[&l.query_id]);
            all_lists.push(RankedList::new(id, l.entries.clone()));
        }
    }
    if all_lists.is_empty() {
        return Err(EvalError::EmptyQuerySet);
    }
    Ok(CloneEvalReport {
        scope: cfg.scope,
        kernel: kcfg.kind.to_string(),
        precision_k: cfg.precision_k,
        groups: report_groups,
        overall: clone_metrics(&all_lists, &all_totals, cfg.precision_k)?,
        unparsed,
    })
}

fn clone_metrics(
    lists: &[RankedList],
    totals: &HashMap<String, usize>,
    k: usize,
) -> Result<MetricsReport, EvalError> {
    Ok(MetricsReport {
        precision_at_k: BTreeMap::from([(k, precision_at_k(lists, k)?)]),
        map: Some(mean_average_precision(lists, totals)?),
        query_count: lists.len(),
        ..Default::default()
    })
}

fn build_groups(bench: &CloneBench, cfg: &CloneEvalConfig, prepared: &[Prepared<'_>]) -> Result<Vec<Group>, EvalError> {
    if prepared.len() < 2 {
        return Err(EvalError::InsufficientEntries { available: prepared.len() });
    }
    // Every member is ranked against the rest of its group.
    let all_pairs = |key: String, members: &[usize]| Group {
        key,
        queries: members
            .iter()
            .map(|&q| (q, members.iter().copied().filter(|&c| c != q).collect()))
            .collect(),
        clone_type: None,
    };
    let mut by_fid: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, p) in prepared.iter().enumerate() {
        by_fid.entry(p.entry.functionality_id).or_default().push(i);
    }
    let id = |i: usize| prepared[i].entry.method_id.as_str();

    let groups = match cfg.scope {
        CloneScope::InterProjectByFunctionality => by_fid
            .iter()
            .map(|(fid, members)| all_pairs(fid.to_string(), members))
            .collect(),
        CloneScope::IntraProject => {
            let mut by_project: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, p) in prepared.iter().enumerate() {
                match &p.entry.project {
                    Some(proj) => by_project.entry(proj).or_default().push(i),
                    None => log::debug!("entry {} has no project", p.entry.method_id),
                }
            }
            by_project
                .into_iter()
                .map(|(project, members)| all_pairs(project.to_string(), &members))
                .collect()
        }
        CloneScope::ByCloneType => cfg
            .types
            .iter()
            .map(|&ty| {
                let mut queries = Vec::new();
                for members in by_fid.values() {
                    for &q in members {
                        // True partners of other types are neither relevant
                        // nor wrong answers for this type, so they are dropped.
                        let candidates: Vec<usize> = members
                            .iter()
                            .copied()
                            .filter(|&c| {
                                c != q
                                    && !bench
                                        .truth
                                        .get(id(q), id(c))
                                        .is_some_and(|t| t.is_true && t.clone_type != Some(ty))
                            })
                            .collect();
                        queries.push((q, candidates));
                    }
                }
                Group {
                    key: ty.to_string(),
                    queries,
                    clone_type: Some(ty),
                }
            })
            .collect(),
    };
    Ok(groups)
}

/// Ranked lists of one group's queries that have at least one relevant
/// candidate, with their relevant totals.
fn rank_group(
    g: &Group,
    bench: &CloneBench,
    prepared: &[Prepared<'_>],
    kcfg: &KernelConfig,
) -> (Vec<RankedList>, HashMap<String, usize>) {
    let relevant = |a: &str, b: &str| {
        bench
            .truth
            .get(a, b)
            .is_some_and(|t| t.is_true && (g.clone_type.is_none() || t.clone_type == g.clone_type))
    };
    let ranked: Vec<Option<(RankedList, usize)>> = g
        .queries
        .par_iter()
        .map(|(q, candidates)| {
            let qp = &prepared[*q];
            let qid = qp.entry.method_id.as_str();
            let mut scored: Vec<(SimilarityScore, &str, bool)> = candidates
                .iter()
                .map(|&c| {
                    let c = &prepared[c];
                    let raw = raw_kernel(&qp.tree, &c.tree, kcfg);
                    let s = if kcfg.normalize {
                        normalize(raw, qp.self_score, c.self_score)
                    } else {
                        SimilarityScore::new(raw)
                    };
                    let cid = c.entry.method_id.as_str();
                    (s, cid, relevant(qid, cid))
                })
                .collect();
            let total = scored.iter().filter(|s| s.2).count();
            if total == 0 {
                return None;
            }
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            let entries = scored.into_iter().map(|(_, id, r)| (id.to_string(), r)).collect();
            Some((RankedList::new(qid, entries), total))
        })
        .collect();
    let mut lists = Vec::new();
    let mut totals = HashMap::new();
    for (list, total) in ranked.into_iter().flatten() {
        totals.insert(list.query_id.clone(), total);
        lists.push(list);
    }
    (lists, totals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CloneTruth, PairTruth};
    use crate::kernels::KernelKind;

    const A: &str = "int add(int a, int b) {\n    int s = a + b;\n    return s;\n}";
    const B: &str = "int plus(int x, int y) {\n    int t = x + y;\n    return t;\n}";
    const C: &str = "void log(String m) {\n    if (m == null) {\n        return;\n    }\n    print(m);\n}";

    fn tiny_bench() -> CloneBench {
        let mut truth = CloneTruth::new();
        truth.insert("a", "b", PairTruth { is_true: true, clone_type: Some(CloneType::T2) });
        truth.insert("a", "c", PairTruth { is_true: false, clone_type: None });
        CloneBench {
            entries: vec![
                CloneBenchEntry::new(1, "a", A),
                CloneBenchEntry::new(1, "b", B),
                CloneBenchEntry::new(1, "c", C),
            ],
            truth,
        }
    }

    #[test]
    fn true_partner_outranks_decoy() {
        for kind in KernelKind::ALL {
            let cfg = CloneEvalConfig::new(KernelConfig::of(kind), CloneScope::InterProjectByFunctionality);
            let r = run_clone_eval(&tiny_bench(), &cfg).unwrap();
            // Queries a and b each have one relevant item; c has none.
            assert_eq!(r.overall.query_count, 2, "{kind}");
            assert_eq!(r.overall.map, Some(1.0), "{kind}");
            assert_eq!(r.groups["1"].precision_at_k[&10], 0.1);
        }
    }

    #[test]
    fn clone_type_scope_filters_short_entries() {
        let mut bench = tiny_bench();
        bench.entries.push(CloneBenchEntry::new(1, "short", "int one() { return 1; }"));
        bench.truth.insert("a", "short", PairTruth { is_true: true, clone_type: Some(CloneType::T2) });
        let cfg = CloneEvalConfig::new(KernelConfig::default(), CloneScope::ByCloneType);
        // Only c reaches the 6-line minimum.
        assert_eq!(
            run_clone_eval(&bench, &cfg),
            Err(EvalError::InsufficientEntries { available: 1 })
        );

        let mut relaxed = cfg.clone();
        relaxed.min_lines = 1;
        let r = run_clone_eval(&bench, &relaxed).unwrap();
        assert_eq!(r.groups["T2"].query_count, 3);
        assert!(!r.groups.contains_key("T1"));
    }

    #[test]
    fn other_types_are_not_candidates() {
        let mut bench = tiny_bench();
        bench.entries.push(CloneBenchEntry::new(1, "d", A));
        bench.truth.insert("a", "d", PairTruth { is_true: true, clone_type: Some(CloneType::T1) });
        let mut cfg = CloneEvalConfig::new(KernelConfig::default(), CloneScope::ByCloneType);
        cfg.min_lines = 1;
        let r = run_clone_eval(&bench, &cfg).unwrap();
        // Without excluding d, the identical T1 copy would outrank b for the
        // T2 query a.
        assert_eq!(r.groups["T2"].map, Some(1.0));
        assert_eq!(r.groups["T1"].map, Some(1.0));
    }

    #[test]
    fn intra_project_groups() {
        let mut bench = tiny_bench();
        for e in &mut bench.entries {
            e.project = Some("p".into());
        }
        let cfg = CloneEvalConfig::new(KernelConfig::default(), CloneScope::IntraProject);
        let r = run_clone_eval(&bench, &cfg).unwrap();
        assert_eq!(r.groups.keys().collect::<Vec<_>>(), ["p"]);
        assert_eq!(r.overall.map, Some(1.0));
    }

    #[test]
    fn too_few_entries() {
        let bench = CloneBench {
            entries: vec![CloneBenchEntry::new(1, "a", A)],
            truth: CloneTruth::new(),
        };
        let cfg = CloneEvalConfig::new(KernelConfig::default(), CloneScope::InterProjectByFunctionality);
        assert_eq!(
            run_clone_eval(&bench, &cfg),
            Err(EvalError::InsufficientEntries { available: 1 })
        );
    }

    #[test]
    fn scope_names_round_trip() {
        for s in [CloneScope::InterProjectByFunctionality, CloneScope::IntraProject, CloneScope::ByCloneType] {
            assert_eq!(s.as_str().parse::<CloneScope>().unwrap(), s);
        }
        assert!("bogus".parse::<CloneScope>().is_err());
    }
}
