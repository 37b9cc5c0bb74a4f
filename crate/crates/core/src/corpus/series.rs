use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, OnceLock};

use chrono::{DateTime, Datelike, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::record::ChangeRecord;
use super::CorpusError;
use crate::ast::Tree;
use crate::retrieval::{read_index, write_index, IndexSnapshot, InvertedIndex, LineReader, RetrievalError};

/// One UTC calendar month, `start` inclusive and `end` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimePeriod {
    /// 1-based.
    pub index: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

fn month_start(t: DateTime<Utc>) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(t.year(), t.month(), 1, 0, 0, 0).unwrap()
}

fn next_month(t: DateTime<Utc>) -> DateTime<Utc> {
    let (y, m) = if t.month() == 12 { (t.year() + 1, 1) } else { (t.year(), t.month() + 1) };
    Utc.with_ymd_and_hms(y, m, 1, 0, 0, 0).unwrap()
}

/// Contiguous months from the month of `first` to the month of `last`.
fn months(first: DateTime<Utc>, last: DateTime<Utc>) -> Vec<TimePeriod> {
    let mut out = Vec::new();
    let mut start = month_start(first);
    while start <= last {
        let end = next_month(start);
        out.push(TimePeriod {
            index: out.len() + 1,
            start,
            end,
        });
        start = end;
    }
    out
}

/// Every record of one project, indexed once in timestamp order, with one
/// cumulative snapshot per calendar month.
///
/// Snapshots are prefixes of the shared index. Candidate trees are parsed on
/// first use and cached.
#[derive(Debug)]
pub struct SnapshotSeries {
    project: String,
    periods: Vec<TimePeriod>,
    records: Vec<ChangeRecord>,
    index: Arc<InvertedIndex>,
    asts: Vec<OnceLock<Option<Tree>>>,
    by_id: HashMap<String, usize>,
}

impl SnapshotSeries {
    fn assemble(records: Vec<ChangeRecord>, index: Arc<InvertedIndex>) -> Self {
        let periods = months(records[0].timestamp, records[records.len() - 1].timestamp);
        let by_id = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.change_id.clone(), i))
            .collect();
        SnapshotSeries {
            project: records[0].project.clone(),
            periods,
            asts: (0..records.len()).map(|_| OnceLock::new()).collect(),
            records,
            index,
            by_id,
        }
    }

    pub fn project(&self) -> &str {
        &self.project
    }

    pub fn periods(&self) -> &[TimePeriod] {
        &self.periods
    }

    pub fn records(&self) -> &[ChangeRecord] {
        &self.records
    }

    pub fn index(&self) -> &Arc<InvertedIndex> {
        &self.index
    }

    /// Number of records with a timestamp before `t`.
    pub fn count_before(&self, t: DateTime<Utc>) -> usize {
        self.records.partition_point(|r| r.timestamp < t)
    }

    /// Snapshot of period `n` (1-based): every record before the end of that
    /// month.
    pub fn snapshot(&self, n: usize) -> Option<SnapshotView<'_>> {
        let p = self.periods.get(n.checked_sub(1)?)?;
        Some(self.view(self.count_before(p.end)))
    }

    pub fn snapshots(&self) -> Vec<(TimePeriod, SnapshotView<'_>)> {
        self.periods
            .iter()
            .map(|p| (*p, self.view(self.count_before(p.end))))
            .collect()
    }

    fn view(&self, limit: usize) -> SnapshotView<'_> {
        SnapshotView { series: self, limit }
    }

    /// Tree for record `ord`: the supplied one, else the parsed source.
    /// `None` when the source is outside the supported Java subset.
    pub fn ast(&self, ord: usize) -> Option<&Tree> {
        self.asts[ord]
            .get_or_init(|| {
                let r = &self.records[ord];
                match r.resolve_ast() {
                    Ok(t) => Some(t.into_owned()),
                    Err(e) => {
                        log::warn!("change {:?}: no tree available ({e})", r.change_id);
                        None
                    }
                }
            })
            .as_ref()
    }
}

/// The records of a series visible at some point in time.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotView<'a> {
    series: &'a SnapshotSeries,
    limit: usize,
}

impl<'a> SnapshotView<'a> {
    pub fn series(&self) -> &'a SnapshotSeries {
        self.series
    }

    pub fn len(&self) -> usize {
        self.limit
    }

    pub fn is_empty(&self) -> bool {
        self.limit == 0
    }

    pub fn records(&self) -> &'a [ChangeRecord] {
        &self.series.records[..self.limit]
    }

    pub fn record(&self, ord: usize) -> Option<&'a ChangeRecord> {
        self.records().get(ord)
    }

    pub fn ordinal(&self, change_id: &str) -> Option<usize> {
        self.series.by_id.get(change_id).copied().filter(|&o| o < self.limit)
    }

    pub fn ast(&self, ord: usize) -> Option<&'a Tree> {
        (ord < self.limit).then(|| self.series.ast(ord)).flatten()
    }

    pub fn index(&self) -> IndexSnapshot {
        IndexSnapshot::prefix(self.series.index.clone(), self.limit)
    }
}

/// Indexes `records` (one project, sorted by timestamp) into month-wise
/// cumulative snapshots.
pub fn build_snapshots(records: Vec<ChangeRecord>) -> Result<SnapshotSeries, CorpusError> {
    let first = records.first().ok_or(CorpusError::EmptyCorpus)?;
    if let Some(other) = records.iter().find(|r| r.project != first.project) {
        return Err(CorpusError::MixedProjects {
            first: first.project.clone(),
            other: other.project.clone(),
        });
    }
    if let Some(i) = records.windows(2).position(|w| w[1].timestamp < w[0].timestamp) {
        return Err(CorpusError::NotSorted { position: i + 1 });
    }
    let mut index = InvertedIndex::new();
    for r in &records {
        index.add(&r.change_id, &r.source_text)?;
    }
    Ok(SnapshotSeries::assemble(records, Arc::new(index)))
}

/// Everything strictly before `query_time`: all full months before the
/// query's month plus the earlier part of that month.
pub fn snapshot_for(series: &SnapshotSeries, query_time: DateTime<Utc>) -> SnapshotView<'_> {
    series.view(series.count_before(query_time))
}

#[derive(Serialize, Deserialize)]
struct SeriesHeader {
    project: String,
    periods: Vec<TimePeriod>,
    records: usize,
}

/// Writes the index section followed by the series header and one JSON line
/// per record.
pub fn write_series<W: Write>(series: &SnapshotSeries, w: &mut W) -> Result<(), CorpusError> {
    write_index(&series.index, w)?;
    let header = SeriesHeader {
        project: series.project.clone(),
        periods: series.periods.clone(),
        records: series.records.len(),
    };
    let json = |e: serde_json::Error| CorpusError::Index(RetrievalError::Json(e));
    let io = |e: std::io::Error| CorpusError::Index(RetrievalError::Io(e));
    writeln!(w, "{}", serde_json::to_string(&header).map_err(json)?).map_err(io)?;
    for r in &series.records {
        writeln!(w, "{}", serde_json::to_string(r).map_err(json)?).map_err(io)?;
    }
    Ok(())
}

pub fn read_series<R: BufRead>(reader: R) -> Result<SnapshotSeries, CorpusError> {
    let mut r = LineReader::new(reader);
    let index = read_index(&mut r)?;
    let header: SeriesHeader = r.parse_json()?;
    let mut records = Vec::with_capacity(header.records);
    for _ in 0..header.records {
        records.push(r.parse_json::<ChangeRecord>()?);
    }
    if r.next_line()?.is_some_and(|l| !l.trim().is_empty()) {
        return Err(r.error("trailing data after the last record").into());
    }
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let consistent = records.len() == index.doc_count()
        && records
            .iter()
            .zip(index.docs())
            .all(|(rec, doc)| rec.change_id == doc.doc_id && rec.source_text == doc.text);
    if !consistent {
        return Err(r.error("records do not match the indexed documents").into());
    }
    if let Some(i) = records.windows(2).position(|w| w[1].timestamp < w[0].timestamp) {
        return Err(CorpusError::NotSorted { position: i + 1 });
    }
    let series = SnapshotSeries::assemble(records, Arc::new(index));
    if series.periods != header.periods || series.project != header.project {
        return Err(r.error("series header does not match its records").into());
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ChangeLabel, MethodChange};

    fn rec(id: &str, ts: &str) -> ChangeRecord {
        ChangeRecord {
            change: MethodChange {
                change_id: id.into(),
                project: "p".into(),
                commit_hash: format!("h-{id}"),
                file_path: "A.java".into(),
                method_name: "m".into(),
                timestamp: ts.parse().unwrap(),
                source_text: format!("int m() {{ return {}; }}", id.len()),
                ast: None,
            },
            label: ChangeLabel::BugInducing,
            paired_fix_id: None,
        }
    }

    fn four_months() -> Vec<ChangeRecord> {
        vec![
            rec("j1", "2021-01-05T00:00:00Z"),
            rec("j2", "2021-01-31T23:59:59Z"),
            rec("f1", "2021-02-10T00:00:00Z"),
            rec("m1", "2021-03-01T00:00:00Z"),
            rec("a1", "2021-04-20T12:00:00Z"),
        ]
    }

    #[test]
    fn one_cumulative_snapshot_per_month() {
        let s = build_snapshots(four_months()).unwrap();
        assert_eq!(s.periods().len(), 4);
        let sizes: Vec<usize> = s.snapshots().iter().map(|(_, v)| v.len()).collect();
        assert_eq!(sizes, [2, 3, 4, 5]);
        let ids: Vec<&str> = s.snapshot(2).unwrap().records().iter().map(|r| r.change_id.as_str()).collect();
        assert_eq!(ids, ["j1", "j2", "f1"]);
        assert!(s.snapshot(0).is_none() && s.snapshot(5).is_none());
        let p = s.periods()[1];
        assert_eq!((p.index, p.start.to_rfc3339()), (2, "2021-02-01T00:00:00+00:00".to_string()));
        assert_eq!(p.end, s.periods()[2].start);
    }

    #[test]
    fn single_month_and_gaps() {
        let s = build_snapshots(vec![rec("a", "2021-06-01T00:00:00Z"), rec("b", "2021-06-30T00:00:00Z")]).unwrap();
        assert_eq!(s.periods().len(), 1);
        let s = build_snapshots(vec![rec("a", "2021-11-15T00:00:00Z"), rec("b", "2022-02-01T00:00:00Z")]).unwrap();
        assert_eq!(s.periods().len(), 4);
        assert_eq!(s.snapshot(2).unwrap().len(), 1);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(build_snapshots(vec![]), Err(CorpusError::EmptyCorpus)));
        let mut recs = four_months();
        recs.swap(0, 2);
        assert!(matches!(build_snapshots(recs), Err(CorpusError::NotSorted { position: 1 })));
        let mut recs = four_months();
        recs[3].change.project = "q".into();
        assert!(matches!(build_snapshots(recs), Err(CorpusError::MixedProjects { .. })));
        let mut recs = four_months();
        recs[3].change.change_id = "j1".into();
        assert!(matches!(build_snapshots(recs), Err(CorpusError::Index(_))));
    }

    #[test]
    fn snapshot_for_is_strict() {
        let s = build_snapshots(four_months()).unwrap();
        let at = |t: &str| snapshot_for(&s, t.parse().unwrap());
        assert_eq!(at("2020-12-01T00:00:00Z").len(), 0);
        assert!(at("2021-01-05T00:00:00Z").is_empty());
        // Third month: Jan + Feb, plus nothing in March before the query.
        assert_eq!(at("2021-03-01T00:00:00Z").len(), 3);
        assert_eq!(at("2021-03-01T00:00:01Z").len(), 4);
        assert_eq!(at("2030-01-01T00:00:00Z").len(), 5);
        let v = at("2021-02-10T00:00:00Z");
        assert!(v.ordinal("f1").is_none() && v.ordinal("j2").is_some());
        assert_eq!(v.index().doc_count(), 2);
    }

    #[test]
    fn lazy_ast_resolution() {
        let mut recs = four_months();
        recs[0].change.source_text = "while (true) {}".into();
        let s = build_snapshots(recs).unwrap();
        assert!(s.ast(0).is_none());
        assert!(s.ast(1).is_some());
        let v = snapshot_for(&s, "2021-01-10T00:00:00Z".parse().unwrap());
        assert!(v.ast(1).is_none());
    }

    #[test]
    fn series_file_round_trips() {
        let mut recs = four_months();
        recs[1].change.ast = Some(crate::ast::parse_sexpr("(X(Y:a b))").unwrap());
        recs[1].label = ChangeLabel::BugFixing;
        recs[0].paired_fix_id = Some("j2".into());
        let s = build_snapshots(recs).unwrap();
        let mut buf = Vec::new();
        write_series(&s, &mut buf).unwrap();
        let back = read_series(buf.as_slice()).unwrap();
        assert_eq!(back.records(), s.records());
        assert_eq!(back.periods(), s.periods());
        assert_eq!(**back.index(), **s.index());
        let mut again = Vec::new();
        write_series(&back, &mut again).unwrap();
        assert_eq!(buf, again);

        let text = String::from_utf8(buf).unwrap();
        let tampered = text.replacen("\"j2\"", "\"zz\"", 1);
        assert!(read_series(tampered.as_bytes()).is_err());
    }
}
