//! S-expression encoding of trees.
//!
//! Grammar: `tree := '(' label tree* ')'`, `label := kind (':' value)?`.
//! Whitespace between tokens and around the colon is ignored; whitespace inside
//! a value is kept. Values escape `(`, `)` and `\` with a backslash.

use super::tree::{Label, Tree, TreeBuilder};
use super::AstError;

/// Parses exactly one tree from `text`.
pub fn parse_sexpr(text: &str) -> Result<Tree, AstError> {
    let bytes = text.as_bytes();
    let mut pos = skip_ws(bytes, 0);
    if pos >= bytes.len() || bytes[pos] != b'(' {
        return Err(AstError::ExpectedOpenParen { offset: pos });
    }

    let mut builder = TreeBuilder::new();
    loop {
        // `pos` sits on a '(' that opens a node.
        pos += 1;
        let label_start = pos;
        let (raw, next) = scan_label(text, pos);
        let label = parse_label(&raw, label_start)?;
        builder.open(label)?;
        pos = next;

        // Close as many nodes as the input closes, stop at the next '('.
        loop {
            pos = skip_ws(bytes, pos);
            match bytes.get(pos) {
                Some(b'(') => break,
                Some(b')') => {
                    builder.close()?;
                    pos += 1;
                    if builder.open_depth() == 0 {
                        let rest = skip_ws(bytes, pos);
                        if rest < bytes.len() {
                            return Err(AstError::TrailingGarbage { offset: rest });
                        }
                        return builder.finish();
                    }
                }
                None => return Err(AstError::UnbalancedParens { offset: pos }),
                // scan_label consumes everything else up to a paren
                Some(_) => unreachable!("label scan stops only at parentheses"),
            }
        }
    }
}

/// Parses a line-delimited `.asts` file: one tree per non-blank line.
pub fn parse_sexpr_lines(text: &str) -> Result<Vec<Tree>, AstError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            parse_sexpr(line).map_err(|e| AstError::AtLine {
                line: i + 1,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Canonical form: no structural whitespace, `Kind:value` without spaces
/// around the colon.
pub fn serialize_sexpr(tree: &Tree) -> String {
    let mut out = String::with_capacity(tree.node_count() * 16);
    let mut work = vec![(tree.root(), 0usize)];
    push_label(&mut out, tree.label(tree.root()));
    while let Some((node, pos)) = work.last_mut() {
        let children = tree.children(*node);
        if *pos < children.len() {
            let child = children[*pos];
            *pos += 1;
            push_label(&mut out, tree.label(child));
            work.push((child, 0));
        } else {
            out.push(')');
            work.pop();
        }
    }
    out
}

/// Number of unescaped `(` in `text`.
pub fn count_open_parens(text: &str) -> usize {
    let mut count = 0;
    let mut escaped = false;
    for c in text.chars() {
        match c {
            _ if escaped => escaped = false,
            '\\' => escaped = true,
            '(' => count += 1,
            _ => {}
        }
    }
    count
}

fn push_label(out: &mut String, label: &Label) {
    out.push('(');
    out.push_str(label.kind());
    if let Some(value) = label.value() {
        out.push(':');
        for c in value.chars() {
            if matches!(c, '(' | ')' | '\\') {
                out.push('\\');
            }
            out.push(c);
        }
    }
}

fn skip_ws(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

/// Reads label text starting at `pos` up to the next unescaped parenthesis.
/// Returns the unescaped text and the offset of that parenthesis.
fn scan_label(text: &str, pos: usize) -> (String, usize) {
    let mut raw = String::new();
    let mut iter = text[pos..].char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        match c {
            '(' | ')' => return (raw, pos + i),
            '\\' => match iter.peek() {
                Some(&(_, next @ ('(' | ')' | '\\'))) => {
                    raw.push(next);
                    iter.next();
                }
                _ => raw.push('\\'),
            },
            _ => raw.push(c),
        }
    }
    (raw, text.len())
}

fn parse_label(raw: &str, offset: usize) -> Result<Label, AstError> {
    let (kind, value) = match raw.split_once(':') {
        Some((k, v)) => (k.trim(), Some(v)),
        None => (raw.trim(), None),
    };
    if kind.is_empty() {
        return Err(AstError::EmptyLabel { offset });
    }
    let label = match value {
        Some(v) if v.trim().is_empty() => return Err(AstError::EmptyLabel { offset }),
        Some(v) => Label::with_value(kind, v),
        None => Label::new(kind),
    };
    label.map_err(|e| match e {
        AstError::InvalidKind { kind, found } => AstError::InvalidLabel {
            offset,
            kind,
            found,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::tree::MAX_DEPTH;
    use crate::ast::LISTING_SEXPR;
    use proptest::prelude::*;

    #[test]
    fn parses_small_tree() {
        let t = parse_sexpr("(A(B)(C))").unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.label(t.root()).kind(), "A");
        let kids: Vec<_> = t
            .children(t.root())
            .iter()
            .map(|&c| t.label(c).kind())
            .collect();
        assert_eq!(kids, ["B", "C"]);
    }

    #[test]
    fn listing_tree_has_21_nodes() {
        // Counted by hand: CompilationUnit, TypeDeclaration, 3 class header
        // nodes, MethodDeclaration, Modifier, SimpleType + SimpleName,
        // SimpleName foo, SingleVariableDeclaration + 2, Block, IfStatement,
        // InfixExpression + 3, ReturnStatement + StringLiteral.
        let t = parse_sexpr(LISTING_SEXPR).unwrap();
        assert_eq!(t.node_count(), 21);
        assert_eq!(t.label(t.root()).kind(), "CompilationUnit");
    }

    #[test]
    fn listing_canonical_form() {
        let t = parse_sexpr(LISTING_SEXPR).unwrap();
        let expected = "(CompilationUnit(TypeDeclaration(Modifier:public)(TYPE_DECLARATION_KIND:class)\
(SimpleName:Example)(MethodDeclaration(Modifier:public)(SimpleType(SimpleName:String))\
(SimpleName:foo)(SingleVariableDeclaration(PrimitiveType:int)(SimpleName:i))(Block(IfStatement\
(InfixExpression(SimpleName:i)(INFIX_EXPRESSION_OPERATOR:==)(NumberLiteral:0))\
(ReturnStatement(StringLiteral:\"Foo!\")))))))";
        assert_eq!(serialize_sexpr(&t), expected);
    }

    #[test]
    fn serializes_trivial_trees() {
        assert_eq!(serialize_sexpr(&parse_sexpr("(A)").unwrap()), "(A)");
        assert_eq!(
            serialize_sexpr(&parse_sexpr(" ( A ( B ) (C) ) ").unwrap()),
            "(A(B)(C))"
        );
    }

    #[test]
    fn error_offsets() {
        assert_eq!(
            parse_sexpr("(A(B)"),
            Err(AstError::UnbalancedParens { offset: 5 })
        );
        assert_eq!(
            parse_sexpr("(A)(B)"),
            Err(AstError::TrailingGarbage { offset: 3 })
        );
        assert_eq!(parse_sexpr("(A)x"), Err(AstError::TrailingGarbage { offset: 3 }));
        assert_eq!(parse_sexpr("()"), Err(AstError::EmptyLabel { offset: 1 }));
        assert_eq!(parse_sexpr("(A(:x))"), Err(AstError::EmptyLabel { offset: 3 }));
        assert_eq!(parse_sexpr("(A:  )"), Err(AstError::EmptyLabel { offset: 1 }));
        assert_eq!(parse_sexpr("A"), Err(AstError::ExpectedOpenParen { offset: 0 }));
        assert_eq!(parse_sexpr(""), Err(AstError::ExpectedOpenParen { offset: 0 }));
        assert!(matches!(
            parse_sexpr("(A B)"),
            Err(AstError::InvalidLabel { offset: 1, .. })
        ));
    }

    #[test]
    fn values_keep_inner_whitespace_and_escapes() {
        let t = parse_sexpr(r#"(StringLiteral: "a \(b\) \\ c" )"#).unwrap();
        assert_eq!(t.label(t.root()).value(), Some(r#""a (b) \ c""#));
        let s = serialize_sexpr(&t);
        assert_eq!(s, r#"(StringLiteral:"a \(b\) \\ c")"#);
        assert_eq!(parse_sexpr(&s).unwrap(), t);
        assert_eq!(count_open_parens(&s), 1);
        // a value may itself contain a colon
        let t = parse_sexpr("(StringLiteral:\"a:b\")").unwrap();
        assert_eq!(t.label(t.root()).value(), Some("\"a:b\""));
    }

    #[test]
    fn deep_input_is_rejected_without_overflow() {
        let deep = "(A".repeat(MAX_DEPTH + 1) + &")".repeat(MAX_DEPTH + 1);
        assert_eq!(
            parse_sexpr(&deep),
            Err(AstError::TooDeep { limit: MAX_DEPTH })
        );
        let ok = "(A".repeat(MAX_DEPTH) + &")".repeat(MAX_DEPTH);
        let t = parse_sexpr(&ok).unwrap();
        assert_eq!(t.depth(), MAX_DEPTH);
        assert_eq!(serialize_sexpr(&t), ok);
    }

    #[test]
    fn multi_tree_lines() {
        let trees = parse_sexpr_lines("(A)\n\n(B(C))\n").unwrap();
        assert_eq!(trees.len(), 2);
        let err = parse_sexpr_lines("(A)\n(B\n").unwrap_err();
        assert!(matches!(err, AstError::AtLine { line: 2, .. }));
    }

    fn arb_label() -> impl Strategy<Value = Label> {
        (
            "[A-Za-z_][A-Za-z0-9_]{0,6}",
            proptest::option::of("[ -~]{1,8}"),
        )
            .prop_filter_map("value must be non-blank", |(k, v)| match v {
                Some(v) if v.trim().is_empty() => None,
                Some(v) => Label::with_value(k, v).ok(),
                None => Label::new(k).ok(),
            })
    }

    pub(crate) fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = arb_label().prop_map(Tree::leaf);
        leaf.prop_recursive(6, 48, 5, |inner| {
            (arb_label(), prop::collection::vec(inner, 0..5))
                .prop_map(|(l, kids)| Tree::node(l, kids).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip(t in arb_tree()) {
            let s = serialize_sexpr(&t);
            prop_assert_eq!(parse_sexpr(&s).unwrap(), t.clone());
            prop_assert_eq!(count_open_parens(&s), t.node_count());
            // deterministic
            prop_assert_eq!(serialize_sexpr(&t.clone()), s);
        }
    }
}
