//! A small recursive-descent parser for a Java-like subset.
//!
//! Produces trees in the same node vocabulary as the JDT-based s-expression
//! dumps (`CompilationUnit`, `TypeDeclaration`, `MethodDeclaration`, `Block`,
//! `SimpleName:x`, `INFIX_EXPRESSION_OPERATOR:==`, ...). Supported: classes,
//! methods, modifiers, primitive and simple types, local variable declarations,
//! `if`/`else`, `return`, blocks, assignments, infix and prefix (`!`, `-`)
//! expressions, method calls, parentheses and literals. Everything else is
//! reported as [`AstError::UnsupportedConstruct`].

use super::tree::{Label, Tree, TreeBuilder};
use super::AstError;

/// Fixed class name used by [`wrap_in_dummy_class`].
pub const WRAPPER_CLASS: &str = "__KernelGuardWrapper__";

/// Maximum syntactic nesting accepted by the parser.
const MAX_NESTING: usize = 256;

/// Wraps bare method sources in one compilation unit so they can be parsed.
pub fn wrap_in_dummy_class<S: AsRef<str>>(method_sources: &[S]) -> Result<String, AstError> {
    if method_sources.is_empty() {
        return Err(AstError::EmptyInput);
    }
    let mut out = format!("public class {WRAPPER_CLASS} {{");
    for m in method_sources {
        out.push(' ');
        out.push_str(m.as_ref().trim());
    }
    out.push_str(" }");
    Ok(out)
}

/// Parses a compilation unit of the supported subset.
pub fn parse_java_subset(source: &str) -> Result<Tree, AstError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        nesting: 0,
    };
    let unit = p.compilation_unit()?;
    unit.into_tree()
}

/// Parses one bare method by wrapping it first.
pub fn parse_method(source: &str) -> Result<Tree, AstError> {
    parse_java_subset(&wrap_in_dummy_class(&[source])?)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Char(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCTS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "++", "--", "<<", ">>", "->", "::", "(", ")", "{", "}", "[",
    "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!", "~", "?", ":", "&", "|",
    "^", "@",
];

fn lex(src: &str) -> Result<Vec<Token>, AstError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            advance(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(syntax(l0, c0, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(&mut i, &mut line, &mut col, 2);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }

        let (l0, c0) = (line, col);
        let start = i;
        let tok = if c.is_alphabetic() || c == '_' || c == '$' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
            {
                advance(&mut i, &mut line, &mut col, 1);
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' || chars[i] == '_')
            {
                advance(&mut i, &mut line, &mut col, 1);
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if c == '"' || c == '\'' {
            advance(&mut i, &mut line, &mut col, 1);
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(syntax(l0, c0, "unterminated literal")),
                    Some('\\') => {
                        let n = 2.min(chars.len() - i);
                        advance(&mut i, &mut line, &mut col, n)
                    }
                    Some(&q) if q == c => {
                        advance(&mut i, &mut line, &mut col, 1);
                        break;
                    }
                    Some(_) => advance(&mut i, &mut line, &mut col, 1),
                }
            }
            let text: String = chars[start..i].iter().collect();
            if c == '"' {
                Tok::Str(text)
            } else {
                Tok::Char(text)
            }
        } else {
            let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    advance(&mut i, &mut line, &mut col, p.len());
                    Tok::Punct(p)
                }
                None => return Err(syntax(l0, c0, &format!("unexpected character {c:?}"))),
            }
        };
        tokens.push(Token {
            tok,
            line: l0,
            column: c0,
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(tokens)
}

fn syntax(line: usize, column: usize, message: &str) -> AstError {
    AstError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "strictfp",
    "transient",
    "volatile",
];

const PRIMITIVES: &[&str] = &[
    "int", "long", "short", "byte", "char", "boolean", "float", "double", "void",
];

/// Keywords that start statements or expressions outside the subset.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "while",
    "for",
    "do",
    "switch",
    "case",
    "try",
    "catch",
    "finally",
    "throw",
    "throws",
    "break",
    "continue",
    "new",
    "this",
    "super",
    "instanceof",
    "assert",
    "yield",
    "var",
    "interface",
    "enum",
    "record",
    "extends",
    "implements",
    "package",
    "import",
    "default",
    "goto",
    "const",
];

/// Owned intermediate node, converted to a [`Tree`] at the end.
struct Ast {
    label: Label,
    kids: Vec<Ast>,
}

impl Ast {
    fn new(kind: &str) -> Ast {
        Ast {
            label: Label::new(kind).expect("static kind"),
            kids: Vec::new(),
        }
    }

    fn valued(kind: &str, value: &str) -> Ast {
        Ast {
            label: Label::with_value(kind, value).expect("static kind, non-empty value"),
            kids: Vec::new(),
        }
    }

    fn with(mut self, kid: Ast) -> Ast {
        self.kids.push(kid);
        self
    }

    fn into_tree(self) -> Result<Tree, AstError> {
        let mut b = TreeBuilder::new();
        let mut work: Vec<std::vec::IntoIter<Ast>> = Vec::new();
        b.open(self.label)?;
        work.push(self.kids.into_iter());
        while let Some(it) = work.last_mut() {
            match it.next() {
                Some(kid) => {
                    b.open(kid.label)?;
                    work.push(kid.kids.into_iter());
                }
                None => {
                    b.close()?;
                    work.pop();
                }
            }
        }
        b.finish()
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nesting: usize,
}

type PResult = Result<Ast, AstError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), AstError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{p}`")))
        }
    }

    fn error(&self, what: &str) -> AstError {
        let (line, column) = self.here();
        let found = match self.peek() {
            Tok::Ident(s) | Tok::Number(s) | Tok::Str(s) | Tok::Char(s) => s.clone(),
            Tok::Punct(p) => p.to_string(),
            Tok::Eof => "end of input".to_string(),
        };
        syntax(line, column, &format!("{what}, found `{found}`"))
    }

    fn unsupported(&self, construct: &str) -> AstError {
        let (line, column) = self.here();
        AstError::UnsupportedConstruct {
            construct: construct.to_string(),
            line,
            column,
        }
    }

    /// Rejects tokens that only appear in constructs outside the subset.
    fn reject_unsupported(&self) -> Result<(), AstError> {
        match self.peek() {
            Tok::Ident(s) if UNSUPPORTED_KEYWORDS.contains(&s.as_str()) => {
                Err(self.unsupported(s))
            }
            Tok::Punct("@") => Err(self.unsupported("annotation")),
            Tok::Punct(p @ ("++" | "--")) => Err(self.unsupported(&format!("`{p}` operator"))),
            Tok::Punct("?") => Err(self.unsupported("conditional expression")),
            Tok::Punct("[") => Err(self.unsupported("array")),
            Tok::Punct("->") => Err(self.unsupported("lambda")),
            Tok::Punct("::") => Err(self.unsupported("method reference")),
            _ => Ok(()),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, AstError> {
        self.reject_unsupported()?;
        match self.peek().clone() {
            Tok::Ident(s)
                if !MODIFIERS.contains(&s.as_str())
                    && !PRIMITIVES.contains(&s.as_str())
                    && !matches!(s.as_str(), "class" | "if" | "else" | "return" | "true" | "false" | "null") =>
            {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn enter(&mut self) -> Result<(), AstError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(AstError::TooDeep { limit: MAX_NESTING });
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.nesting -= 1;
    }

    fn compilation_unit(&mut self) -> PResult {
        let mut unit = Ast::new("CompilationUnit");
        if matches!(self.peek(), Tok::Eof) {
            return Err(self.error("expected a class declaration"));
        }
        while !matches!(self.peek(), Tok::Eof) {
            unit = unit.with(self.type_declaration()?);
        }
        Ok(unit)
    }

    fn modifiers(&mut self) -> Result<Vec<Ast>, AstError> {
        let mut mods = Vec::new();
        loop {
            self.reject_unsupported()?;
            match self.peek() {
                Tok::Ident(s) if MODIFIERS.contains(&s.as_str()) => {
                    mods.push(Ast::valued("Modifier", s));
                    self.bump();
                }
                _ => return Ok(mods),
            }
        }
    }

    fn type_declaration(&mut self) -> PResult {
        let mut decl = Ast::new("TypeDeclaration");
        decl.kids.extend(self.modifiers()?);
        if !self.is_word("class") {
            return Err(self.error("expected `class`"));
        }
        self.bump();
        decl = decl.with(Ast::valued("TYPE_DECLARATION_KIND", "class"));
        let name = self.ident("class name")?;
        decl = decl.with(Ast::valued("SimpleName", &name));
        if self.is_punct("<") {
            return Err(self.unsupported("generic type"));
        }
        self.reject_unsupported()?;
        self.expect_punct("{")?;
        while !self.eat_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error("expected `}`"));
            }
            decl = decl.with(self.member()?);
        }
        Ok(decl)
    }

    fn member(&mut self) -> PResult {
        let mods = self.modifiers()?;
        if self.is_word("class") {
            return Err(self.unsupported("nested class"));
        }
        if self.is_punct("{") {
            return Err(self.unsupported("initializer block"));
        }
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("(")) {
            return Err(self.unsupported("constructor"));
        }
        if self.is_punct("<") {
            return Err(self.unsupported("generic method"));
        }
        let ty = self.ty()?;
        let name = self.ident("member name")?;
        if !self.is_punct("(") {
            if self.is_punct("=") || self.is_punct(";") || self.is_punct(",") {
                return Err(self.unsupported("field declaration"));
            }
            return Err(self.error("expected `(`"));
        }
        self.bump();

        let mut method = Ast::new("MethodDeclaration");
        method.kids.extend(mods);
        method = method.with(ty).with(Ast::valued("SimpleName", &name));
        if !self.eat_punct(")") {
            loop {
                method = method.with(self.parameter()?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        self.reject_unsupported()?;
        if self.is_punct(";") {
            return Err(self.unsupported("abstract method"));
        }
        Ok(method.with(self.block()?))
    }

    fn parameter(&mut self) -> PResult {
        let mut param = Ast::new("SingleVariableDeclaration");
        param.kids.extend(self.modifiers()?);
        let ty = self.ty()?;
        if self.is_punct("...") {
            return Err(self.unsupported("varargs"));
        }
        let name = self.ident("parameter name")?;
        Ok(param.with(ty).with(Ast::valued("SimpleName", &name)))
    }

    fn ty(&mut self) -> PResult {
        self.reject_unsupported()?;
        let ty = match self.peek().clone() {
            Tok::Ident(s) if PRIMITIVES.contains(&s.as_str()) => {
                self.bump();
                Ast::valued("PrimitiveType", &s)
            }
            Tok::Ident(_) => {
                let name = self.ident("type name")?;
                if self.is_punct(".") {
                    return Err(self.unsupported("qualified type"));
                }
                Ast::new("SimpleType").with(Ast::valued("SimpleName", &name))
            }
            _ => return Err(self.error("expected a type")),
        };
        if self.is_punct("<") {
            return Err(self.unsupported("generic type"));
        }
        if self.is_punct("[") {
            return Err(self.unsupported("array type"));
        }
        Ok(ty)
    }

    fn block(&mut self) -> PResult {
        self.enter()?;
        self.expect_punct("{")?;
        let mut block = Ast::new("Block");
        while !self.eat_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error("expected `}`"));
            }
            block = block.with(self.statement()?);
        }
        self.leave();
        Ok(block)
    }

    fn starts_local_declaration(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if PRIMITIVES.contains(&s.as_str()) || s == "final" => true,
            Tok::Ident(s) if !UNSUPPORTED_KEYWORDS.contains(&s.as_str()) => {
                matches!(self.peek_at(1), Tok::Ident(_) | Tok::Punct("<" | "["))
            }
            _ => false,
        }
    }

    fn statement(&mut self) -> PResult {
        self.reject_unsupported()?;
        if self.is_punct("{") {
            return self.block();
        }
        if self.is_punct(";") {
            return Err(self.unsupported("empty statement"));
        }
        if self.is_word("if") {
            self.enter()?;
            self.bump();
            self.expect_punct("(")?;
            let mut stmt = Ast::new("IfStatement").with(self.expression()?);
            self.expect_punct(")")?;
            stmt = stmt.with(self.statement()?);
            if self.is_word("else") {
                self.bump();
                stmt = stmt.with(self.statement()?);
            }
            self.leave();
            return Ok(stmt);
        }
        if self.is_word("else") {
            return Err(self.error("`else` without `if`"));
        }
        if self.is_word("return") {
            self.bump();
            let mut stmt = Ast::new("ReturnStatement");
            if !self.is_punct(";") {
                stmt = stmt.with(self.expression()?);
            }
            self.expect_punct(";")?;
            return Ok(stmt);
        }
        if self.is_word("class") {
            return Err(self.unsupported("local class"));
        }
        if self.starts_local_declaration() {
            return self.local_declaration();
        }

        let (line, column) = self.here();
        let expr = self.expression()?;
        let kind = expr.label.kind();
        if kind != "MethodInvocation" && kind != "Assignment" {
            return Err(syntax(line, column, "not a statement"));
        }
        self.expect_punct(";")?;
        Ok(Ast::new("ExpressionStatement").with(expr))
    }

    fn local_declaration(&mut self) -> PResult {
        let mut stmt = Ast::new("VariableDeclarationStatement");
        stmt.kids.extend(self.modifiers()?);
        let ty = self.ty()?;
        if matches!(&ty.label.value(), Some("void")) {
            return Err(self.error("`void` variable"));
        }
        stmt = stmt.with(ty);
        loop {
            let name = self.ident("variable name")?;
            let mut frag = Ast::new("VariableDeclarationFragment").with(Ast::valued("SimpleName", &name));
            self.reject_unsupported()?;
            if self.eat_punct("=") {
                frag = frag.with(self.expression()?);
            }
            stmt = stmt.with(frag);
            if self.eat_punct(";") {
                return Ok(stmt);
            }
            self.expect_punct(",")?;
        }
    }

    fn expression(&mut self) -> PResult {
        self.enter()?;
        let lhs = self.binary(0)?;
        self.reject_unsupported()?;
        let op = match self.peek() {
            Tok::Punct(p @ ("=" | "+=" | "-=" | "*=" | "/=" | "%=")) => *p,
            Tok::Punct(p @ ("&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>=")) => {
                return Err(self.unsupported(&format!("`{p}` operator")))
            }
            _ => {
                self.leave();
                return Ok(lhs);
            }
        };
        if lhs.label.kind() != "SimpleName" {
            return Err(self.error("assignment target must be a name"));
        }
        self.bump();
        let rhs = self.expression()?;
        self.leave();
        Ok(Ast::new("Assignment")
            .with(lhs)
            .with(Ast::valued("ASSIGNMENT_OPERATOR", op))
            .with(rhs))
    }

    fn binary(&mut self, level: usize) -> PResult {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut left = self.binary(level + 1)?;
        loop {
            self.reject_unsupported()?;
            let op = match self.peek() {
                Tok::Punct(p) if LEVELS[level].contains(p) => *p,
                Tok::Punct(p @ ("&" | "|" | "^" | "<<" | ">>" | ">>>")) => {
                    return Err(self.unsupported(&format!("`{p}` operator")))
                }
                _ => return Ok(left),
            };
            self.bump();
            let right = self.binary(level + 1)?;
            left = Ast::new("InfixExpression")
                .with(left)
                .with(Ast::valued("INFIX_EXPRESSION_OPERATOR", op))
                .with(right);
        }
    }

    fn unary(&mut self) -> PResult {
        self.reject_unsupported()?;
        let op = match self.peek() {
            Tok::Punct(p @ ("!" | "-")) => *p,
            Tok::Punct(p @ ("+" | "~")) => return Err(self.unsupported(&format!("prefix `{p}`"))),
            _ => return self.postfix(),
        };
        self.enter()?;
        self.bump();
        let operand = self.unary()?;
        self.leave();
        Ok(Ast::new("PrefixExpression")
            .with(Ast::valued("PREFIX_EXPRESSION_OPERATOR", op))
            .with(operand))
    }

    fn postfix(&mut self) -> PResult {
        let mut expr = self.primary()?;
        loop {
            self.reject_unsupported()?;
            if !self.is_punct(".") {
                return Ok(expr);
            }
            self.bump();
            let name = self.ident("method name")?;
            if !self.is_punct("(") {
                return Err(self.unsupported("field access"));
            }
            let mut call = Ast::new("MethodInvocation")
                .with(expr)
                .with(Ast::valued("SimpleName", &name));
            call.kids.extend(self.arguments()?);
            expr = call;
        }
    }

    fn arguments(&mut self) -> Result<Vec<Ast>, AstError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expression()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn primary(&mut self) -> PResult {
        self.reject_unsupported()?;
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Ast::valued("NumberLiteral", &n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Ast::valued("StringLiteral", &s))
            }
            Tok::Char(c) => {
                self.bump();
                Ok(Ast::valued("CharacterLiteral", &c))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(Ast::valued("BooleanLiteral", &w))
            }
            Tok::Ident(w) if w == "null" => {
                self.bump();
                Ok(Ast::new("NullLiteral"))
            }
            Tok::Ident(w) if PRIMITIVES.contains(&w.as_str()) => {
                Err(self.unsupported("primitive type in expression"))
            }
            Tok::Ident(_) => {
                let name = self.ident("expression")?;
                if self.is_punct("(") {
                    let mut call = Ast::new("MethodInvocation").with(Ast::valued("SimpleName", &name));
                    call.kids.extend(self.arguments()?);
                    Ok(call)
                } else {
                    Ok(Ast::valued("SimpleName", &name))
                }
            }
            Tok::Punct("(") => {
                if matches!(self.peek_at(1), Tok::Ident(s) if PRIMITIVES.contains(&s.as_str()))
                    && matches!(self.peek_at(2), Tok::Punct(")"))
                {
                    return Err(self.unsupported("cast"));
                }
                self.enter()?;
                self.bump();
                let inner = self.expression()?;
                self.expect_punct(")")?;
                self.leave();
                Ok(Ast::new("ParenthesizedExpression").with(inner))
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{parse_sexpr, serialize_sexpr, LISTING_SEXPR};

    const LISTING_SOURCE: &str = r#"public class Example {
    public String foo(int i) {
        if (i == 0) return "Foo!";
    }
}"#;

    fn sexpr(src: &str) -> String {
        serialize_sexpr(&parse_java_subset(src).unwrap())
    }

    #[test]
    fn listing_source_maps_to_listing_tree() {
        let parsed = parse_java_subset(LISTING_SOURCE).unwrap();
        assert_eq!(parsed, parse_sexpr(LISTING_SEXPR).unwrap());
    }

    #[test]
    fn empty_class() {
        assert_eq!(
            sexpr("class X {}"),
            "(CompilationUnit(TypeDeclaration(TYPE_DECLARATION_KIND:class)(SimpleName:X)))"
        );
    }

    #[test]
    fn declaration_fragment() {
        let t = parse_method("void m() { int i = 0; }").unwrap();
        let decl = "(VariableDeclarationStatement(PrimitiveType:int)\
(VariableDeclarationFragment(SimpleName:i)(NumberLiteral:0)))";
        let s = serialize_sexpr(&t);
        assert!(s.contains(decl), "{s}");
    }

    #[test]
    fn wrapper_template() {
        assert_eq!(
            wrap_in_dummy_class(&["public String foo(int i) { ... }"]).unwrap(),
            "public class __KernelGuardWrapper__ { public String foo(int i) { ... } }"
        );
        let two = wrap_in_dummy_class(&["void a() {}", "void b() {}"]).unwrap();
        assert!(two.find("a()").unwrap() < two.find("b()").unwrap());
        let empty: [&str; 0] = [];
        assert_eq!(wrap_in_dummy_class(&empty), Err(AstError::EmptyInput));

        let t = parse_java_subset(&two).unwrap();
        let s = serialize_sexpr(&t);
        assert!(s.starts_with(
            "(CompilationUnit(TypeDeclaration(Modifier:public)(TYPE_DECLARATION_KIND:class)\
(SimpleName:__KernelGuardWrapper__)(MethodDeclaration"
        ));
        assert_eq!(s.matches("(MethodDeclaration").count(), 2);
    }

    #[test]
    fn expressions_statements_and_precedence() {
        let s = sexpr(
            "class C { static boolean f(int a, final Foo b) {
                // comment
                int x = a + 2 * 3, y;
                y = -x;
                if (!(a < 3) && b.ok(x, \"s\")) { log(x); } else if (a >= 1) return false; else { }
                /* block */
                return a == 1 || x != 'c';
            } }",
        );
        assert!(s.contains(
            "(InfixExpression(SimpleName:a)(INFIX_EXPRESSION_OPERATOR:+)(InfixExpression(NumberLiteral:2)\
(INFIX_EXPRESSION_OPERATOR:*)(NumberLiteral:3)))"
        ));
        assert!(s.contains("(VariableDeclarationFragment(SimpleName:y))"));
        assert!(s.contains("(ExpressionStatement(Assignment(SimpleName:y)(ASSIGNMENT_OPERATOR:=)\
(PrefixExpression(PREFIX_EXPRESSION_OPERATOR:-)(SimpleName:x))))"));
        assert!(s.contains("(SingleVariableDeclaration(Modifier:final)(SimpleType(SimpleName:Foo))(SimpleName:b))"));
        assert!(s.contains("(MethodInvocation(SimpleName:b)(SimpleName:ok)(SimpleName:x)(StringLiteral:\"s\"))"));
        assert!(s.contains("(ExpressionStatement(MethodInvocation(SimpleName:log)(SimpleName:x)))"));
        assert!(s.contains("(ParenthesizedExpression(InfixExpression(SimpleName:a)(INFIX_EXPRESSION_OPERATOR:<)(NumberLiteral:3)))"));
        assert!(s.contains("(CharacterLiteral:'c')"));
        assert!(s.contains("(ReturnStatement(BooleanLiteral:false))"));
        // else branch is an empty block
        assert!(s.contains("(Block))"));
    }

    #[test]
    fn string_literals_with_parens_round_trip() {
        let t = parse_method(r#"String f() { return "a(b) \" \\"; }"#).unwrap();
        let s = serialize_sexpr(&t);
        assert_eq!(parse_sexpr(&s).unwrap(), t);
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let cases = [
            ("void f() { while (x) { } }", "while"),
            ("void f() { for (;;) { } }", "for"),
            ("void f() { i++; }", "`++` operator"),
            ("void f() { Foo x = new Foo(); }", "new"),
            ("int x = 3;", "field declaration"),
            ("void f() { int[] a; }", "array type"),
            ("void f() { return a ? b : c; }", "conditional expression"),
            ("@Override void f() { }", "annotation"),
            ("void f() { List<String> a; }", "generic type"),
            ("void f() { int y = (int) x; }", "cast"),
        ];
        for (src, construct) in cases {
            match parse_method(src) {
                Err(AstError::UnsupportedConstruct { construct: c, .. }) => {
                    assert_eq!(c, construct, "{src}")
                }
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_java_subset("class X {\n  void f() { int = 3; }\n}") {
            Err(AstError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 18)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_java_subset("class X { void f() { a + b; } }"),
            Err(AstError::Syntax { .. })
        ));
        assert!(matches!(parse_java_subset(""), Err(AstError::Syntax { .. })));
        assert!(matches!(
            parse_java_subset("class X { void f() { \"abc } }"),
            Err(AstError::Syntax { .. })
        ));
    }

    #[test]
    fn deeply_nested_input_is_rejected() {
        let src = format!("void f() {{ return {}1{}; }}", "(".repeat(400), ")".repeat(400));
        assert!(matches!(parse_method(&src), Err(AstError::TooDeep { .. })));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            parse_java_subset(LISTING_SOURCE).unwrap(),
            parse_java_subset(LISTING_SOURCE).unwrap()
        );
    }
}
