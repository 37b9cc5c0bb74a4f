use std::fmt::Write;

use super::clone::CloneEvalReport;
use super::defect::DefectEvalReport;
use super::metrics::MetricsReport;

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn render(headers: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([headers[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        parts.join("  ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", line(headers));
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for r in rows {
        let _ = writeln!(out, "{}", line(r));
    }
    out
}

/// Per-project table with Top-K, MRR, accuracy and F-score columns and a
/// closing mean row.
pub fn defect_table(report: &DefectEvalReport) -> String {
    let ks: Vec<usize> = report.mean.topk_accuracy.keys().copied().collect();
    let mut headers = vec!["Project".to_string(), "Queries".to_string()];
    headers.extend(ks.iter().map(|k| format!("K={k}")));
    headers.extend(["MRR", "Accuracy", "F-score"].map(String::from));
    let row = |name: &str, m: &MetricsReport| {
        let mut r = vec![name.to_string(), m.query_count.to_string()];
        r.extend(ks.iter().map(|k| cell(m.topk_accuracy.get(k).copied())));
        r.extend([cell(m.mrr), cell(m.accuracy), cell(m.f_score)]);
        r
    };
    let mut rows: Vec<Vec<String>> = report.projects.iter().map(|(p, m)| row(p, m)).collect();
    rows.push(row("Mean", &report.mean));
    render(&headers, &rows)
}

/// Per-group Precision@k and MAP, with an overall row.
pub fn clone_table(report: &CloneEvalReport) -> String {
    let k = report.precision_k;
    let headers = [
        report.scope.as_str().to_string(),
        "Queries".to_string(),
        format!("P@{k}"),
        "MAP".to_string(),
    ];
    let row = |name: &str, m: &MetricsReport| {
        vec![
            name.to_string(),
            m.query_count.to_string(),
            cell(m.precision_at_k.get(&k).copied()),
            cell(m.map),
        ]
    };
    let mut groups: Vec<(&String, &MetricsReport)> = report.groups.iter().collect();
    // Numeric functionality ids read better in numeric order.
    groups.sort_by_key(|(g, _)| (g.parse::<u64>().unwrap_or(u64::MAX), (*g).clone()));
    let mut rows: Vec<Vec<String>> = groups.into_iter().map(|(g, m)| row(g, m)).collect();
    rows.push(row("Overall", &report.overall));
    render(&headers, &rows)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::evaluation::CloneScope;

    #[test]
    fn defect_table_layout() {
        let m = MetricsReport {
            topk_accuracy: BTreeMap::from([(1, 0.5), (5, 1.0)]),
            mrr: Some(0.75),
            accuracy: Some(0.5),
            f_score: Some(2.0 / 3.0),
            query_count: 4,
            ..Default::default()
        };
        let report = DefectEvalReport {
            k: 1,
            projects: BTreeMap::from([("alpha".to_string(), m.clone())]),
            mean: m,
            skipped_projects: BTreeMap::new(),
            skipped_queries: 0,
            time_violations: 0,
            outcomes: Vec::new(),
        };
        let t = defect_table(&report);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        for h in ["Project", "K=1", "K=5", "MRR", "Accuracy", "F-score"] {
            assert!(lines[0].contains(h), "{t}");
        }
        assert!(lines[2].starts_with("alpha"));
        assert!(lines[2].contains("0.6667"));
        assert!(lines[3].starts_with("Mean"));
    }

    #[test]
    fn clone_table_orders_numeric_groups() {
        let m = MetricsReport {
            precision_at_k: BTreeMap::from([(10, 0.3)]),
            map: Some(1.0),
            query_count: 3,
            ..Default::default()
        };
        let report = CloneEvalReport {
            scope: CloneScope::InterProjectByFunctionality,
            kernel: "PTK".into(),
            precision_k: 10,
            groups: BTreeMap::from([("10".to_string(), m.clone()), ("9".to_string(), m.clone())]),
            overall: m,
            unparsed: Vec::new(),
        };
        let t = clone_table(&report);
        let firsts: Vec<&str> = t.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(firsts[2..], ["9", "10", "Overall"]);
        assert!(t.lines().next().unwrap().contains("P@10"));
    }
}
