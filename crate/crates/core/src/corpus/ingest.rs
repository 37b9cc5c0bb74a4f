//! Dataset adapters.
//!
//! JSONL: one object per line with `change_id`, `project`, `commit_hash`,
//! `file_path`, `method_name`, `timestamp` (RFC 3339), `label`
//! (`bug_inducing` | `bug_fixing`), `source_text`, and optionally `ast`
//! (s-expression) and `paired_fix_id`. Blank lines are skipped.
//!
//! Technical Debt CSV: a method-level export of the dataset's commit and
//! SZZ tables, with a header row. Column names are case-insensitive:
//!
//! | column        | maps to                    | notes                                      |
//! |---------------|----------------------------|--------------------------------------------|
//! | `PROJECT_ID`  | `project`                  |                                            |
//! | `COMMIT_HASH` | `commit_hash`              |                                            |
//! | `COMMIT_DATE` | `timestamp`                | RFC 3339 or `YYYY-MM-DD HH:MM:SS` (UTC)    |
//! | `FILE`        | `file_path`                | rows for non-`.java` files are dropped     |
//! | `METHOD`      | `method_name`              |                                            |
//! | `LABEL`       | `label`                    | `FAULT_INDUCING`/`FAULT_FIXING`; `REFACTORING` rows are dropped |
//! | `SOURCE`      | `source_text`              | rows with empty source are dropped         |
//! | `CHANGE_TYPE` | (filter, optional)         | `DELETE`/`DELETED`/`RENAME`/`REFACTOR` rows are dropped |
//! | `CHANGE_ID`   | `change_id` (optional)     | default `COMMIT_HASH:FILE:METHOD`          |
//! | `FIXED_BY`    | `paired_fix_id` (optional) |                                            |

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::Deserialize;

use super::record::{ChangeLabel, ChangeRecord, MethodChange};
use super::CorpusError;
use crate::ast::parse_sexpr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    TechnicalDebtCsv,
}

impl InputFormat {
    /// `.csv` files are read as Technical Debt exports, anything else as JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => InputFormat::TechnicalDebtCsv,
            _ => InputFormat::Jsonl,
        }
    }
}

/// Reads a change file, drops filtered rows and returns records in timestamp
/// order (ties keep file order).
pub fn ingest_changes(path: &Path, format: InputFormat) -> Result<Vec<ChangeRecord>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    match format {
        InputFormat::Jsonl => parse_changes_jsonl(BufReader::new(file)),
        InputFormat::TechnicalDebtCsv => parse_td_csv(file),
    }
}

#[derive(Deserialize)]
struct RawRecord {
    change_id: String,
    project: String,
    commit_hash: String,
    file_path: String,
    method_name: String,
    timestamp: String,
    #[serde(default)]
    label: Option<String>,
    source_text: String,
    #[serde(default)]
    ast: Option<String>,
    #[serde(default)]
    paired_fix_id: Option<String>,
}

fn malformed(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRecord {
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = DateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%z") {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|n| n.and_utc())
}

fn raw_to_change(raw: RawRecord, line: usize) -> Result<(MethodChange, Option<String>, Option<String>), CorpusError> {
    let timestamp = parse_timestamp(&raw.timestamp)
        .ok_or_else(|| malformed(line, format!("unparseable timestamp {:?}", raw.timestamp)))?;
    if raw.change_id.trim().is_empty() {
        return Err(malformed(line, "empty change_id"));
    }
    let ast = match raw.ast.as_deref() {
        Some(s) => Some(parse_sexpr(s).map_err(|e| malformed(line, format!("ast: {e}")))?),
        None => None,
    };
    let change = MethodChange {
        change_id: raw.change_id,
        project: raw.project,
        commit_hash: raw.commit_hash,
        file_path: raw.file_path,
        method_name: raw.method_name,
        timestamp,
        source_text: raw.source_text,
        ast,
    };
    Ok((change, raw.label, raw.paired_fix_id))
}

/// Non-blank lines with 1-based line numbers.
fn json_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, RawRecord), CorpusError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line_no = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(malformed(line_no, e.to_string()))),
        };
        if line.trim().is_empty() {
            return None;
        }
        Some(
            serde_json::from_str::<RawRecord>(&line)
                .map(|r| (line_no, r))
                .map_err(|e| malformed(line_no, e.to_string())),
        )
    })
}

/// Labeled JSONL change records, sorted by timestamp.
pub fn parse_changes_jsonl<R: BufRead>(reader: R) -> Result<Vec<ChangeRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for item in json_lines(reader) {
        let (line, raw) = item?;
        let (change, label, paired_fix_id) = raw_to_change(raw, line)?;
        let label_text = label.ok_or_else(|| malformed(line, "missing field `label`"))?;
        let label = ChangeLabel::parse(&label_text).ok_or(CorpusError::UnknownLabel {
            line,
            label: label_text,
        })?;
        records.push(ChangeRecord {
            change,
            label,
            paired_fix_id: paired_fix_id.filter(|s| !s.is_empty()),
        });
        lines.push(line);
    }
    finish(records, &lines)
}

/// Unlabeled changes (a commit payload). Any `label` field is ignored.
pub fn parse_method_changes_jsonl<R: BufRead>(reader: R) -> Result<Vec<MethodChange>, CorpusError> {
    json_lines(reader)
        .map(|item| {
            let (line, raw) = item?;
            raw_to_change(raw, line).map(|(c, _, _)| c)
        })
        .collect()
}

/// Uniqueness and fix-link checks, then a stable sort by timestamp.
fn finish(mut records: Vec<ChangeRecord>, lines: &[usize]) -> Result<Vec<ChangeRecord>, CorpusError> {
    let mut seen = HashSet::new();
    for (r, &line) in records.iter().zip(lines) {
        if !seen.insert(r.change_id.clone()) {
            return Err(CorpusError::DuplicateChangeId {
                line,
                id: r.change_id.clone(),
            });
        }
    }
    let labels: HashMap<String, ChangeLabel> =
        records.iter().map(|r| (r.change_id.clone(), r.label)).collect();
    for r in &mut records {
        let Some(fix) = r.paired_fix_id.clone() else {
            continue;
        };
        match labels.get(&fix) {
            Some(ChangeLabel::BugFixing) => {}
            Some(ChangeLabel::BugInducing) => {
                return Err(CorpusError::InvalidFixReference {
                    change_id: r.change_id.clone(),
                    fix_id: fix,
                })
            }
            None => {
                log::warn!("change {:?}: paired fix {fix:?} is not in the corpus; link dropped", r.change_id);
                r.paired_fix_id = None;
            }
        }
    }
    records.sort_by_key(|r| r.timestamp);
    Ok(records)
}

fn td_label(raw: &str) -> Result<Option<ChangeLabel>, ()> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "fault_inducing" | "bug_inducing" | "inducing" => Ok(Some(ChangeLabel::BugInducing)),
        "fault_fixing" | "bug_fixing" | "fixing" => Ok(Some(ChangeLabel::BugFixing)),
        "refactoring" => Ok(None),
        _ => Err(()),
    }
}

fn td_change_kept(raw: &str) -> bool {
    !matches!(
        raw.trim().to_ascii_lowercase().as_str(),
        "delete" | "deleted" | "rename" | "renamed" | "refactor" | "refactoring"
    )
}

/// Technical Debt CSV export; see the module docs for the column mapping.
pub fn parse_td_csv<R: Read>(reader: R) -> Result<Vec<ChangeRecord>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let need = |name: &str| col(name).ok_or_else(|| malformed(1, format!("missing column {name}")));
    let (project, hash, date, file, method, label, source) = (
        need("PROJECT_ID")?,
        need("COMMIT_HASH")?,
        need("COMMIT_DATE")?,
        need("FILE")?,
        need("METHOD")?,
        need("LABEL")?,
        need("SOURCE")?,
    );
    let (change_type, change_id, fixed_by) = (col("CHANGE_TYPE"), col("CHANGE_ID"), col("FIXED_BY"));

    let mut records = Vec::new();
    let mut lines = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            malformed(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let get = |i: usize| row.get(i).unwrap_or("");
        let Ok(label) = td_label(get(label)) else {
            return Err(CorpusError::UnknownLabel {
                line,
                label: get(label).to_string(),
            });
        };
        let Some(label) = label else { continue };
        if change_type.is_some_and(|c| !td_change_kept(get(c))) {
            continue;
        }
        if !get(file).trim().to_ascii_lowercase().ends_with(".java") || get(source).trim().is_empty() {
            continue;
        }
        let timestamp = parse_timestamp(get(date))
            .ok_or_else(|| malformed(line, format!("unparseable timestamp {:?}", get(date))))?;
        let id = match change_id.map(get).filter(|s| !s.trim().is_empty()) {
            Some(id) => id.to_string(),
            None => format!("{}:{}:{}", get(hash), get(file), get(method)),
        };
        records.push(ChangeRecord {
            change: MethodChange {
                change_id: id,
                project: get(project).to_string(),
                commit_hash: get(hash).to_string(),
                file_path: get(file).to_string(),
                method_name: get(method).to_string(),
                timestamp,
                source_text: get(source).to_string(),
                ast: None,
            },
            label,
            paired_fix_id: fixed_by.map(get).filter(|s| !s.trim().is_empty()).map(str::to_string),
        });
        lines.push(line);
    }
    finish(records, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jsonl(id: &str, ts: &str, label: &str) -> String {
        format!(
            r#"{{"change_id":"{id}","project":"p","commit_hash":"h{id}","file_path":"A.java","method_name":"m","timestamp":"{ts}","label":"{label}","source_text":"void m() {{}}"}}"#
        )
    }

    #[test]
    fn jsonl_records_come_back_in_time_order() {
        let text = [
            jsonl("c", "2020-03-01T00:00:00Z", "bug_fixing"),
            String::new(),
            jsonl("a", "2020-01-01T00:00:00Z", "bug_inducing"),
            jsonl("b", "2020-02-01T10:00:00+02:00", "bug_inducing"),
        ]
        .join("\n");
        let recs = parse_changes_jsonl(text.as_bytes()).unwrap();
        let ids: Vec<&str> = recs.iter().map(|r| r.change_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(recs[1].timestamp.to_rfc3339(), "2020-02-01T08:00:00+00:00");
        assert_eq!(recs, parse_changes_jsonl(text.as_bytes()).unwrap());
    }

    #[test]
    fn jsonl_errors_carry_line_numbers() {
        let text = [jsonl("a", "2020-01-01T00:00:00Z", "bug_inducing"), jsonl("b", "yesterday", "bug_fixing")].join("\n");
        assert!(matches!(
            parse_changes_jsonl(text.as_bytes()),
            Err(CorpusError::MalformedRecord { line: 2, .. })
        ));
        let text = jsonl("a", "2020-01-01T00:00:00Z", "refactoring");
        assert!(matches!(
            parse_changes_jsonl(text.as_bytes()),
            Err(CorpusError::UnknownLabel { line: 1, .. })
        ));
        let text = [jsonl("a", "2020-01-01T00:00:00Z", "bug_fixing"), jsonl("a", "2020-01-02T00:00:00Z", "bug_fixing")].join("\n");
        assert!(matches!(
            parse_changes_jsonl(text.as_bytes()),
            Err(CorpusError::DuplicateChangeId { line: 2, .. })
        ));
        assert!(matches!(
            parse_changes_jsonl(&b"{not json"[..]),
            Err(CorpusError::MalformedRecord { line: 1, .. })
        ));
    }

    #[test]
    fn supplied_ast_is_parsed() {
        let line = jsonl("a", "2020-01-01T00:00:00Z", "bug_inducing").replace(r#""label""#, r#""ast":"(A(B))","label""#);
        let recs = parse_changes_jsonl(line.as_bytes()).unwrap();
        assert_eq!(recs[0].ast.as_ref().unwrap().node_count(), 2);
        let bad = line.replace("(A(B))", "(A(B)");
        assert!(matches!(
            parse_changes_jsonl(bad.as_bytes()),
            Err(CorpusError::MalformedRecord { line: 1, .. })
        ));
    }

    #[test]
    fn fix_links_are_checked() {
        let with_fix = |id: &str, ts: &str, label: &str, fix: &str| {
            jsonl(id, ts, label).replace(r#""label""#, &format!(r#""paired_fix_id":"{fix}","label""#))
        };
        let ok = [
            with_fix("a", "2020-01-01T00:00:00Z", "bug_inducing", "f"),
            jsonl("f", "2020-02-01T00:00:00Z", "bug_fixing"),
            with_fix("b", "2020-01-05T00:00:00Z", "bug_inducing", "missing"),
        ]
        .join("\n");
        let recs = parse_changes_jsonl(ok.as_bytes()).unwrap();
        assert_eq!(recs[0].paired_fix_id.as_deref(), Some("f"));
        assert_eq!(recs[1].paired_fix_id, None);

        let bad = [
            with_fix("a", "2020-01-01T00:00:00Z", "bug_inducing", "b"),
            jsonl("b", "2020-02-01T00:00:00Z", "bug_inducing"),
        ]
        .join("\n");
        assert!(matches!(
            parse_changes_jsonl(bad.as_bytes()),
            Err(CorpusError::InvalidFixReference { .. })
        ));
    }

    #[test]
    fn payload_ignores_labels() {
        let line = jsonl("a", "2020-01-01T00:00:00Z", "whatever");
        let changes = parse_method_changes_jsonl(line.as_bytes()).unwrap();
        assert_eq!(changes.len(), 1);
        let unlabeled = line.replace(r#""label":"whatever","#, "");
        assert_eq!(parse_method_changes_jsonl(unlabeled.as_bytes()).unwrap(), changes);
    }

    #[test]
    fn td_csv_filters_rows() {
        let csv = "\
PROJECT_ID,COMMIT_HASH,COMMIT_DATE,FILE,METHOD,LABEL,SOURCE,CHANGE_TYPE,FIXED_BY
proj,h2,2019-05-02 10:00:00,src/A.java,a,FAULT_FIXING,\"int a() { return 1; }\",MODIFY,
proj,h1,2019-05-01 10:00:00,src/A.java,a,FAULT_INDUCING,\"int a() { return 0; }\",ADD,h2:src/A.java:a
proj,h3,2019-05-03 10:00:00,src/B.java,b,REFACTORING,\"int b() { return 0; }\",MODIFY,
proj,h4,2019-05-04 10:00:00,src/C.java,c,FAULT_INDUCING,\"int c() { return 0; }\",DELETE,
proj,h5,2019-05-05 10:00:00,README.md,-,FAULT_INDUCING,text,MODIFY,
";
        let recs = parse_td_csv(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].change_id, "h1:src/A.java:a");
        assert_eq!(recs[0].label, ChangeLabel::BugInducing);
        assert_eq!(recs[0].paired_fix_id.as_deref(), Some("h2:src/A.java:a"));
        assert_eq!(recs[1].label, ChangeLabel::BugFixing);

        let unknown = csv.replace("FAULT_FIXING", "MYSTERY");
        assert!(matches!(
            parse_td_csv(unknown.as_bytes()),
            Err(CorpusError::UnknownLabel { line: 2, .. })
        ));
        let bad_date = csv.replace("2019-05-02 10:00:00", "someday");
        assert!(matches!(
            parse_td_csv(bad_date.as_bytes()),
            Err(CorpusError::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn timestamp_formats() {
        for s in ["2020-01-02T03:04:05Z", "2020-01-02 03:04:05", "2020-01-02T03:04:05", "2020-01-02 05:04:05+0200"] {
            assert_eq!(parse_timestamp(s).unwrap().to_rfc3339(), "2020-01-02T03:04:05+00:00", "{s}");
        }
        assert!(parse_timestamp("2020-13-01").is_none());
    }
}
