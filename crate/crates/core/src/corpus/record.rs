use std::borrow::Cow;
use std::fmt;
use std::ops::Deref;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ast::{parse_method, AstError, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeLabel {
    BugInducing,
    BugFixing,
}

impl ChangeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeLabel::BugInducing => "bug_inducing",
            ChangeLabel::BugFixing => "bug_fixing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bug_inducing" => Some(ChangeLabel::BugInducing),
            "bug_fixing" => Some(ChangeLabel::BugFixing),
            _ => None,
        }
    }
}

impl fmt::Display for ChangeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A method-level change without ground truth, as it arrives at commit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodChange {
    pub change_id: String,
    pub project: String,
    pub commit_hash: String,
    pub file_path: String,
    pub method_name: String,
    pub timestamp: DateTime<Utc>,
    pub source_text: String,
    /// Supplied tree; when absent, [`MethodChange::resolve_ast`] parses
    /// `source_text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ast: Option<Tree>,
}

impl MethodChange {
    /// The supplied tree, or the result of parsing the method source.
    pub fn resolve_ast(&self) -> Result<Cow<'_, Tree>, AstError> {
        match &self.ast {
            Some(t) => Ok(Cow::Borrowed(t)),
            None => parse_method(&self.source_text).map(Cow::Owned),
        }
    }
}

/// A labeled historical change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeRecord {
    #[serde(flatten)]
    pub change: MethodChange,
    pub label: ChangeLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired_fix_id: Option<String>,
}

impl Deref for ChangeRecord {
    type Target = MethodChange;

    fn deref(&self) -> &MethodChange {
        &self.change
    }
}
