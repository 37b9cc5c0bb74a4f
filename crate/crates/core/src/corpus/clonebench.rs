//! Clone-bench layout:
//!
//! ```text
//! <root>/functionality_<id>/<method_id>.java
//! <root>/functionality_<id>/<method_id>.sexpr   optional pre-built tree
//! <root>/pairs.csv                              id1,id2,is_true,clone_type
//! <root>/projects.csv                           method_id,project (optional)
//! ```
//!
//! `is_true` accepts `true`/`false`/`1`/`0`; `clone_type` is one of T1, T2,
//! VST3, ST3, MT3, WT3T4 and may be empty for false pairs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::ast::{parse_sexpr, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CloneType {
    T1,
    T2,
    #[serde(rename = "VST3")]
    Vst3,
    #[serde(rename = "ST3")]
    St3,
    #[serde(rename = "MT3")]
    Mt3,
    #[serde(rename = "WT3T4")]
    Wt3T4,
}

impl CloneType {
    pub const ALL: [CloneType; 6] = [
        CloneType::T1,
        CloneType::T2,
        CloneType::Vst3,
        CloneType::St3,
        CloneType::Mt3,
        CloneType::Wt3T4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CloneType::T1 => "T1",
            CloneType::T2 => "T2",
            CloneType::Vst3 => "VST3",
            CloneType::St3 => "ST3",
            CloneType::Mt3 => "MT3",
            CloneType::Wt3T4 => "WT3T4",
        }
    }
}

impl fmt::Display for CloneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        CloneType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown clone type {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTruth {
    pub is_true: bool,
    pub clone_type: Option<CloneType>,
}

/// Ground truth keyed by unordered method-id pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CloneTruth {
    pairs: BTreeMap<(String, String), PairTruth>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CloneTruth {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a pair; returns the previous entry if one existed.
    pub fn insert(&mut self, a: &str, b: &str, truth: PairTruth) -> Option<PairTruth> {
        self.pairs.insert(key(a, b), truth)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<PairTruth> {
        self.pairs.get(&key(a, b)).copied()
    }

    pub fn is_true_clone(&self, a: &str, b: &str) -> bool {
        self.get(a, b).is_some_and(|t| t.is_true)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, PairTruth)> {
        self.pairs.iter().map(|((a, b), t)| (a.as_str(), b.as_str(), *t))
    }

    /// Number of true clones of each method.
    pub fn true_partner_counts(&self) -> HashMap<&str, usize> {
        let mut m = HashMap::new();
        for (a, b, t) in self.iter() {
            if t.is_true {
                *m.entry(a).or_insert(0) += 1;
                *m.entry(b).or_insert(0) += 1;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloneBenchEntry {
    pub functionality_id: u32,
    pub method_id: String,
    pub source_text: String,
    pub line_count: usize,
    pub project: Option<String>,
    pub ast: Option<Tree>,
}

impl CloneBenchEntry {
    pub fn new(functionality_id: u32, method_id: impl Into<String>, source_text: impl Into<String>) -> Self {
        let source_text = source_text.into();
        CloneBenchEntry {
            functionality_id,
            method_id: method_id.into(),
            line_count: line_count(&source_text),
            source_text,
            project: None,
            ast: None,
        }
    }
}

/// Lines of the trimmed text.
pub fn line_count(text: &str) -> usize {
    text.trim().lines().count()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CloneBench {
    /// Sorted by functionality, then method id.
    pub entries: Vec<CloneBenchEntry>,
    pub truth: CloneTruth,
}

impl CloneBench {
    pub fn entry(&self, method_id: &str) -> Option<&CloneBenchEntry> {
        self.entries.iter().find(|e| e.method_id == method_id)
    }

    pub fn functionalities(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.entries.iter().map(|e| e.functionality_id).collect();
        ids.dedup();
        ids
    }
}

fn bench_err(msg: impl Into<String>) -> CorpusError {
    CorpusError::CloneBench(msg.into())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

pub fn ingest_clonebench(root: &Path) -> Result<CloneBench, CorpusError> {
    let mut entries = Vec::new();
    let dir = fs::read_dir(root).map_err(|e| CorpusError::io(root, e))?;
    for item in dir {
        let item = item.map_err(|e| CorpusError::io(root, e))?;
        let name = item.file_name().to_string_lossy().into_owned();
        let Some(id) = name.strip_prefix("functionality_") else {
            continue;
        };
        let functionality_id: u32 = id
            .parse()
            .map_err(|_| bench_err(format!("bad functionality directory {name:?}")))?;
        let path = item.path();
        for file in fs::read_dir(&path).map_err(|e| CorpusError::io(&path, e))? {
            let file = file.map_err(|e| CorpusError::io(&path, e))?.path();
            if file.extension().and_then(|e| e.to_str()) != Some("java") {
                continue;
            }
            let method_id = file.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let text = fs::read_to_string(&file).map_err(|e| CorpusError::io(&file, e))?;
            let mut entry = CloneBenchEntry::new(functionality_id, method_id, text);
            let sexpr = file.with_extension("sexpr");
            if sexpr.exists() {
                let s = fs::read_to_string(&sexpr).map_err(|e| CorpusError::io(&sexpr, e))?;
                entry.ast =
                    Some(parse_sexpr(&s).map_err(|e| bench_err(format!("{}: {e}", sexpr.display())))?);
            }
            entries.push(entry);
        }
    }
    entries.sort_by(|a, b| (a.functionality_id, &a.method_id).cmp(&(b.functionality_id, &b.method_id)));
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        if by_id.insert(e.method_id.clone(), i).is_some() {
            return Err(CorpusError::DuplicateMethodId(e.method_id.clone()));
        }
    }

    let projects = root.join("projects.csv");
    if projects.exists() {
        let mut rdr = csv::Reader::from_path(&projects).map_err(|e| bench_err(e.to_string()))?;
        for row in rdr.records() {
            let row = row.map_err(|e| bench_err(format!("projects.csv: {e}")))?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let (id, project) = (row.get(0).unwrap_or("").trim(), row.get(1).unwrap_or("").trim());
            let i = *by_id.get(id).ok_or_else(|| CorpusError::DanglingReference {
                line,
                method_id: id.to_string(),
            })?;
            entries[i].project = Some(project.to_string());
        }
    }

    let pairs = root.join("pairs.csv");
    let mut rdr = csv::Reader::from_path(&pairs).map_err(|e| bench_err(format!("{}: {e}", pairs.display())))?;
    let mut truth = CloneTruth::new();
    for row in rdr.records() {
        let row = row.map_err(|e| bench_err(format!("pairs.csv: {e}")))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let bad = |msg: String| CorpusError::MalformedRecord { line, message: msg };
        for id in [field(0), field(1)] {
            if !by_id.contains_key(id) {
                return Err(CorpusError::DanglingReference {
                    line,
                    method_id: id.to_string(),
                });
            }
        }
        let is_true = parse_bool(field(2)).ok_or_else(|| bad(format!("bad is_true value {:?}", field(2))))?;
        let clone_type = match field(3) {
            "" => None,
            t => Some(t.parse::<CloneType>().map_err(bad)?),
        };
        let t = PairTruth { is_true, clone_type };
        if let Some(prev) = truth.insert(field(0), field(1), t) {
            if prev != t {
                return Err(bad(format!("conflicting entries for pair {} {}", field(0), field(1))));
            }
        }
    }
    Ok(CloneBench { entries, truth })
}
