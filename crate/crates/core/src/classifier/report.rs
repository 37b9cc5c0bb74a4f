use std::fmt::Write;

use serde::Serialize;

use super::{ClassificationResult, Prediction, RankedMatch, SourceRef};

pub const NO_RISK_LINE: &str = "no risky changes detected";
pub const NO_FIX_LINE: &str = "no recorded fix";

const MIN_COLUMN: usize = 36;
const MAX_COLUMN: usize = 60;

fn display_lines(text: &str) -> Vec<String> {
    text.trim_end().lines().map(|l| l.replace('\t', "    ")).collect()
}

/// Pads or cuts `s` to exactly `width` characters.
fn fit(s: &str, width: usize) -> String {
    let n = s.chars().count();
    if n <= width {
        format!("{s}{}", " ".repeat(width - n))
    } else {
        let mut out: String = s.chars().take(width.saturating_sub(1)).collect();
        out.push('~');
        out
    }
}

fn side_by_side(out: &mut String, left_title: &str, left: &str, right_title: &str, right: &str) {
    let l = display_lines(left);
    let r = display_lines(right);
    let width = l
        .iter()
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(0)
        .clamp(MIN_COLUMN, MAX_COLUMN);
    let _ = writeln!(out, "    {} | {}", fit(left_title, width), right_title);
    let _ = writeln!(out, "    {}-+-{}", "-".repeat(width), "-".repeat(width));
    for i in 0..l.len().max(r.len()) {
        let a = l.get(i).map_or("", String::as_str);
        let b = r.get(i).map_or("", String::as_str);
        let _ = writeln!(out, "    {} | {}", fit(a, width), b);
    }
}

/// Plain-text report of the flagged methods: the match that triggered the
/// flag, both sources side by side and the paired fix when one is known.
pub fn render_report(results: &[ClassificationResult]) -> String {
    let flagged: Vec<&ClassificationResult> = results.iter().filter(|r| r.is_risky()).collect();
    if flagged.is_empty() {
        return format!("{NO_RISK_LINE}\n");
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} of {} changed methods look risky",
        flagged.len(),
        results.len()
    );
    for r in flagged {
        let _ = writeln!(out);
        let _ = writeln!(out, "RISKY {} in {} (commit {})", r.method_name, r.file_path, r.commit_hash);
        let matched = r.flagged_match.as_ref();
        let m: Option<&RankedMatch> =
            matched.and_then(|f| r.matches.iter().find(|m| m.change_id == f.change_id));
        if let (Some(f), Some(m)) = (matched, m) {
            let _ = writeln!(
                out,
                "  matches past change {} (commit {}, {}) at rank {} with score {}",
                f.change_id,
                f.commit_hash,
                m.timestamp.format("%Y-%m-%d"),
                m.rank,
                m.kernel_score
            );
            let _ = writeln!(out);
            side_by_side(&mut out, "incoming change", &r.query_source, "matched bug-inducing change", &f.source_text);
        }
        let _ = writeln!(out);
        match &r.suggested_fix {
            Some(SourceRef {
                change_id,
                commit_hash,
                source_text,
            }) => {
                let _ = writeln!(out, "  suggested fix from change {change_id} (commit {commit_hash}):");
                for line in display_lines(source_text) {
                    let _ = writeln!(out, "    {line}");
                }
            }
            None => {
                let _ = writeln!(out, "  {NO_FIX_LINE}");
            }
        }
    }
    // Padding leaves trailing blanks when the right column is short.
    let lines: Vec<&str> = out.lines().map(str::trim_end).collect();
    lines.join("\n") + "\n"
}

#[derive(Serialize)]
struct JsonLine<'a> {
    query_change_id: &'a str,
    method_name: &'a str,
    file_path: &'a str,
    commit_hash: &'a str,
    predicted_label: Prediction,
    k: usize,
    top_matches: &'a [RankedMatch],
    flagged_match: Option<&'a SourceRef>,
    suggested_fix: Option<&'a SourceRef>,
}

/// One JSON object per result, with the same information as the text report
/// plus the unflagged methods.
pub fn render_report_jsonl(results: &[ClassificationResult]) -> String {
    let mut out = String::new();
    for r in results {
        let line = JsonLine {
            query_change_id: &r.query_change_id,
            method_name: &r.method_name,
            file_path: &r.file_path,
            commit_hash: &r.commit_hash,
            predicted_label: r.predicted_label,
            k: r.k,
            top_matches: r.top_k(),
            flagged_match: r.flagged_match.as_ref(),
            suggested_fix: r.suggested_fix.as_ref(),
        };
        out.push_str(&serde_json::to_string(&line).expect("report fields serialize"));
        out.push('\n');
    }
    out
}
