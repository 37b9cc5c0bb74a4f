//! Tree data model, s-expression encoding and the built-in Java-subset parser.

mod java;
mod sexpr;
mod tree;

use thiserror::Error;

pub use java::{parse_java_subset, parse_method, wrap_in_dummy_class, WRAPPER_CLASS};
pub use sexpr::{count_open_parens, parse_sexpr, parse_sexpr_lines, serialize_sexpr};
pub use tree::{Label, Node, NodeId, Tree, TreeBuilder, MAX_DEPTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("unbalanced parentheses at byte {offset}")]
    UnbalancedParens { offset: usize },
    #[error("empty label at byte {offset}")]
    EmptyLabel { offset: usize },
    #[error("trailing characters at byte {offset}")]
    TrailingGarbage { offset: usize },
    #[error("expected '(' at byte {offset}")]
    ExpectedOpenParen { offset: usize },
    #[error("invalid label kind {kind:?} at byte {offset}: contains {found:?}")]
    InvalidLabel {
        offset: usize,
        kind: String,
        found: char,
    },
    #[error("invalid label kind {kind:?}: contains {found:?}")]
    InvalidKind { kind: String, found: char },
    #[error("tree nesting exceeds {limit} levels")]
    TooDeep { limit: usize },
    #[error("tree has no nodes")]
    EmptyTree,
    #[error("tree has more than one root")]
    MultipleRoots,
    #[error("close without a matching open node")]
    UnbalancedClose,
    #[error("{open} nodes left open")]
    UnclosedNodes { open: usize },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<AstError>,
    },
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct `{construct}` at {line}:{column}")]
    UnsupportedConstruct {
        construct: String,
        line: usize,
        column: usize,
    },
    #[error("no method sources given")]
    EmptyInput,
}

impl serde::Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&serialize_sexpr(self))
    }
}

impl<'de> serde::Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_sexpr(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) const LISTING_SEXPR: &str = "(CompilationUnit(TypeDeclaration(Modifier:public)(TYPE_DECLARATION_KIND:class)(SimpleName:Example)(MethodDeclaration (Modifier:public)(SimpleType(SimpleName:String))(SimpleName:foo)(SingleVariableDeclaration(PrimitiveType: int)(SimpleName: i))(Block (IfStatement(InfixExpression(SimpleName: i)(INFIX_EXPRESSION_OPERATOR: ==)(NumberLiteral: 0))(ReturnStatement(StringLiteral: \"Foo!\")))))))";
