//! Line-delimited index file.
//!
//! ```text
//! KGIDX1
//! {"doc_count":N,"terms":{"shingle":S,"edgegram":E}}
//! {"id":..,"text":..,"metadata":{..},"len":[shingles,edgegrams]}   N lines
//! {"field":"shingle","term":..,"postings":[[ordinal,tf],..]}       S + E lines
//! ```
//!
//! Term lines are written in field order, then term order, so the output is
//! byte-for-byte deterministic.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::analyze::Field;
use super::index::{InvertedIndex, Posting, StoredDoc};
use super::RetrievalError;

pub const MAGIC: &str = "KGIDX1";

#[derive(Serialize, Deserialize)]
struct Header {
    doc_count: usize,
    terms: TermTotals,
}

#[derive(Serialize, Deserialize)]
struct TermTotals {
    shingle: usize,
    edgegram: usize,
}

#[derive(Serialize, Deserialize)]
struct DocLine {
    id: String,
    text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    len: [u32; 2],
}

#[derive(Serialize, Deserialize)]
struct TermLine<'a> {
    field: Field,
    #[serde(borrow)]
    term: std::borrow::Cow<'a, str>,
    postings: Vec<Posting>,
}

/// Numbered line reader shared with other line-delimited formats.
pub struct LineReader<R> {
    inner: R,
    line: usize,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(inner: R) -> Self {
        LineReader { inner, line: 0 }
    }

    /// 1-based number of the last line returned.
    pub fn line_number(&self) -> usize {
        self.line
    }

    pub fn next_line(&mut self) -> Result<Option<String>, RetrievalError> {
        let mut buf = String::new();
        if self.inner.read_line(&mut buf)? == 0 {
            return Ok(None);
        }
        self.line += 1;
        while buf.ends_with('\n') || buf.ends_with('\r') {
            buf.pop();
        }
        Ok(Some(buf))
    }

    pub fn expect_line(&mut self) -> Result<String, RetrievalError> {
        self.next_line()?.ok_or(RetrievalError::Format {
            line: self.line + 1,
            message: "unexpected end of file".into(),
        })
    }

    pub fn error(&self, message: impl Into<String>) -> RetrievalError {
        RetrievalError::Format {
            line: self.line,
            message: message.into(),
        }
    }

    pub fn parse_json<T: for<'de> Deserialize<'de>>(&mut self) -> Result<T, RetrievalError> {
        let line = self.expect_line()?;
        serde_json::from_str(&line).map_err(|e| self.error(e.to_string()))
    }
}

pub fn write_index<W: Write>(index: &InvertedIndex, w: &mut W) -> Result<(), RetrievalError> {
    writeln!(w, "{MAGIC}")?;
    let header = Header {
        doc_count: index.doc_count(),
        terms: TermTotals {
            shingle: index.term_count(Field::Shingle),
            edgegram: index.term_count(Field::Edgegram),
        },
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for d in index.docs() {
        let line = DocLine {
            id: d.doc_id.clone(),
            text: d.text.clone(),
            metadata: d.metadata.clone(),
            len: d.field_len,
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    for field in Field::ALL {
        for (term, postings) in index.sorted_terms(field) {
            let line = TermLine {
                field,
                term: term.into(),
                postings: postings.to_vec(),
            };
            writeln!(w, "{}", serde_json::to_string(&line)?)?;
        }
    }
    Ok(())
}

/// Reads one index section, leaving the reader just past it.
pub fn read_index<R: BufRead>(r: &mut LineReader<R>) -> Result<InvertedIndex, RetrievalError> {
    let magic = r.expect_line()?;
    if magic != MAGIC {
        return Err(RetrievalError::BadMagic(magic));
    }
    let header: Header = r.parse_json()?;
    let mut docs = Vec::with_capacity(header.doc_count);
    for _ in 0..header.doc_count {
        let d: DocLine = r.parse_json()?;
        docs.push(StoredDoc {
            doc_id: d.id,
            text: d.text,
            metadata: d.metadata,
            field_len: d.len,
        });
    }
    let mut postings: [HashMap<String, Vec<Posting>>; 2] = Default::default();
    let totals = [header.terms.shingle, header.terms.edgegram];
    for field in Field::ALL {
        for _ in 0..totals[field.slot()] {
            let line = r.expect_line()?;
            let t: TermLine = serde_json::from_str(&line).map_err(|e| r.error(e.to_string()))?;
            if t.field != field {
                return Err(r.error(format!("expected a {field:?} term record")));
            }
            let sorted = t.postings.windows(2).all(|w| w[0].0 < w[1].0);
            let in_range = t.postings.iter().all(|p| (p.0 as usize) < docs.len() && p.1 > 0);
            if t.postings.is_empty() || !sorted || !in_range {
                return Err(r.error(format!("invalid postings for term {:?}", t.term)));
            }
            if postings[field.slot()].insert(t.term.into_owned(), t.postings).is_some() {
                return Err(r.error("duplicate term record"));
            }
        }
    }
    InvertedIndex::from_parts(docs, postings)
}
