//! Seeded generators for Java-subset methods, change corpora and clone
//! benches. Everything they produce parses with [`crate::ast::parse_method`].

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ChangeLabel, ChangeRecord, CloneBench, CloneBenchEntry, CloneTruth, CloneType, MethodChange, PairTruth};

const VAR_WORDS: &[&str] = &[
    "total", "count", "index", "result", "value", "item", "buffer", "limit", "offset", "name", "size", "flag",
    "cursor", "length", "score", "weight", "delta", "key", "node", "path",
];
const CALL_WORDS: &[&str] = &[
    "compute", "append", "check", "load", "store", "size", "lookup", "put", "close", "reset", "parse", "emit",
    "update", "flush", "merge",
];
const DOMAIN_WORDS: &[&str] = &[
    "Order", "Invoice", "Account", "Session", "Token", "Record", "Config", "Channel", "Message", "Report",
    "Payment", "Customer", "Schedule", "Document", "Profile", "Cache", "Stream", "Query", "Route", "Ticket",
    "Asset", "Batch", "Ledger", "Policy", "Quota", "Widget", "Signal", "Vendor", "Credit", "Address",
];
const QUALIFIER_WORDS: &[&str] = &[
    "", "Remote", "Cached", "Pending", "Shared", "Local", "Draft", "Signed", "Legacy", "Primary", "Batch", "Audit",
];
const METHOD_WORDS: &[&str] = &[
    "process", "handle", "build", "apply", "render", "collect", "resolve", "prepare", "validate", "convert",
];
const NAMED_TYPES: &[&str] = &["String", "Object", "Builder", "Reader", "Request"];
const INFIX: &[&str] = &["+", "-", "*", "/", "%", "==", "!=", "<", ">", "<=", ">=", "&&", "||"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Int,
    Boolean,
    Long,
    Double,
    Named(usize),
    Void,
}

impl Ty {
    fn render(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Boolean => "boolean",
            Ty::Long => "long",
            Ty::Double => "double",
            Ty::Named(i) => NAMED_TYPES[i % NAMED_TYPES.len()],
            Ty::Void => "void",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Num(i64),
    Str(usize),
    Bool(bool),
    Null,
    Call { recv: Option<Box<Expr>>, name: usize, args: Vec<Expr> },
    Infix(Box<Expr>, &'static str, Box<Expr>),
    Not(Box<Expr>),
    Paren(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Decl { ty: Ty, var: usize, init: Option<Expr> },
    Assign { var: usize, op: &'static str, value: Expr },
    Call(Expr),
    If { cond: Expr, then: Vec<Stmt>, els: Option<Vec<Stmt>> },
    Return(Option<Expr>),
}

/// Structure of a generated method. Identifiers are indices into name pools
/// and are only spelled out by [`MethodSpec::render`].
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub ret: Ty,
    pub name: usize,
    pub params: Vec<(Ty, usize)>,
    pub body: Vec<Stmt>,
    /// Noun appended to every callee, standing in for the API a method uses.
    pub domain: usize,
    /// Distinguishes otherwise identical variable names between specs.
    pub salt: u32,
}

/// How identifiers are spelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Naming<'a> {
    Original,
    /// Every variable and parameter, and the method's own name, gets this
    /// suffix.
    Suffixed(&'a str),
}

fn domain_name(i: usize) -> String {
    let noun = DOMAIN_WORDS[i % DOMAIN_WORDS.len()];
    let qualifier = QUALIFIER_WORDS[(i / DOMAIN_WORDS.len()) % QUALIFIER_WORDS.len()];
    format!("{qualifier}{noun}")
}

struct Render<'a> {
    out: String,
    naming: Naming<'a>,
    domain: String,
    salt: u32,
    indent: usize,
    reformat: bool,
}

impl Render<'_> {
    fn ident(&self, base: &str, i: usize, pool: usize) -> String {
        let round = i / pool;
        let mut s = if round == 0 {
            base.to_string()
        } else {
            format!("{base}{round}")
        };
        if self.salt > 0 {
            s.push_str(&format!("_{}", self.salt));
        }
        if let Naming::Suffixed(sfx) = self.naming {
            s.push_str(sfx);
        }
        s
    }

    fn var(&self, i: usize) -> String {
        self.ident(VAR_WORDS[i % VAR_WORDS.len()], i, VAR_WORDS.len())
    }

    /// Callees belong to other code, so renaming leaves them alone.
    fn call_name(&self, i: usize) -> String {
        format!("{}{}", CALL_WORDS[i % CALL_WORDS.len()], self.domain)
    }

    fn line(&mut self, text: &str) {
        let unit = if self.reformat { "\t" } else { "    " };
        self.out.push_str(&unit.repeat(self.indent));
        self.out.push_str(text);
        self.out.push('\n');
        if self.reformat && text.ends_with('{') {
            self.out.push('\n');
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Var(v) => self.var(*v),
            Expr::Num(n) => n.to_string(),
            Expr::Str(s) => format!("\"msg {s}\""),
            Expr::Bool(b) => b.to_string(),
            Expr::Null => "null".into(),
            Expr::Call { recv, name, args } => {
                let args: Vec<String> = args.iter().map(|a| self.expr(a)).collect();
                let call = format!("{}({})", self.call_name(*name), args.join(", "));
                match recv {
                    Some(r) => format!("{}.{call}", self.expr(r)),
                    None => call,
                }
            }
            Expr::Infix(l, op, r) => format!("{} {op} {}", self.expr(l), self.expr(r)),
            Expr::Not(x) => format!("!{}", self.expr(x)),
            Expr::Paren(x) => format!("({})", self.expr(x)),
        }
    }

    fn stmts(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Decl { ty, var, init } => {
                let text = match init {
                    Some(e) => format!("{} {} = {};", ty.render(), self.var(*var), self.expr(e)),
                    None => format!("{} {};", ty.render(), self.var(*var)),
                };
                self.line(&text);
            }
            Stmt::Assign { var, op, value } => {
                let text = format!("{} {op} {};", self.var(*var), self.expr(value));
                self.line(&text);
            }
            Stmt::Call(e) => {
                let text = format!("{};", self.expr(e));
                self.line(&text);
            }
            Stmt::If { cond, then, els } => {
                let text = format!("if ({}) {{", self.expr(cond));
                self.line(&text);
                self.indent += 1;
                self.stmts(then);
                self.indent -= 1;
                if let Some(els) = els {
                    self.line("} else {");
                    self.indent += 1;
                    self.stmts(els);
                    self.indent -= 1;
                }
                self.line("}");
            }
            Stmt::Return(e) => {
                let text = match e {
                    Some(e) => format!("return {};", self.expr(e)),
                    None => "return;".to_string(),
                };
                self.line(&text);
            }
        }
    }
}

impl MethodSpec {
    pub fn render(&self, naming: Naming<'_>) -> String {
        self.render_with(naming, false)
    }

    /// Same tokens with tab indentation and a blank line after every `{`.
    pub fn render_reformatted(&self, naming: Naming<'_>) -> String {
        self.render_with(naming, true)
    }

    fn render_with(&self, naming: Naming<'_>, reformat: bool) -> String {
        let mut r = Render {
            out: String::new(),
            naming,
            domain: domain_name(self.domain),
            salt: self.salt,
            indent: 0,
            reformat,
        };
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(t, v)| format!("{} {}", t.render(), r.var(*v)))
            .collect();
        let mut name = METHOD_WORDS[self.name % METHOD_WORDS.len()].to_string();
        if self.salt > 0 {
            name.push_str(&self.salt.to_string());
        }
        if let Naming::Suffixed(s) = naming {
            name.push_str(s);
        }
        r.line(&format!("public {} {name}({}) {{", self.ret.render(), params.join(", ")));
        r.indent += 1;
        r.stmts(&self.body);
        r.indent -= 1;
        r.line("}");
        r.out.trim_end().to_string() + "\n"
    }

    /// Number of top-level statements.
    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }
}

struct SpecGen<'r, R: Rng> {
    rng: &'r mut R,
    vars: Vec<usize>,
    next_var: usize,
    /// Operators this method draws from.
    ops: Vec<&'static str>,
    /// Relative weights of declaration, assignment, call and `if` statements.
    kinds: WeightedIndex<u32>,
    /// Leaf, infix, call, negation and parenthesized expressions.
    exprs: WeightedIndex<u32>,
    /// Variable, number, string, boolean and null leaves.
    leaves: WeightedIndex<u32>,
}

/// Random weights over `n` choices; the first is always possible.
fn style<R: Rng>(rng: &mut R, n: usize) -> WeightedIndex<u32> {
    let w: Vec<u32> = (0..n).map(|i| rng.gen_range(u32::from(i == 0)..5)).collect();
    WeightedIndex::new(w).expect("first weight is positive")
}

impl<R: Rng> SpecGen<'_, R> {
    fn fresh_var(&mut self) -> usize {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    fn ty(&mut self) -> Ty {
        match self.rng.gen_range(0..6) {
            0 | 1 => Ty::Int,
            2 => Ty::Boolean,
            3 => Ty::Long,
            4 => Ty::Double,
            _ => Ty::Named(self.rng.gen_range(0..NAMED_TYPES.len())),
        }
    }

    fn leaf(&mut self) -> Expr {
        match self.leaves.sample(self.rng) {
            0 if !self.vars.is_empty() => Expr::Var(*self.vars.choose(self.rng).unwrap()),
            2 => Expr::Str(self.rng.gen_range(0..500)),
            3 => Expr::Bool(self.rng.gen_bool(0.5)),
            4 => Expr::Null,
            _ => Expr::Num(self.rng.gen_range(0..1000)),
        }
    }

    fn call(&mut self, depth: usize) -> Expr {
        let recv = (self.rng.gen_bool(0.25) && !self.vars.is_empty())
            .then(|| Box::new(Expr::Var(*self.vars.choose(self.rng).unwrap())));
        let nargs = self.rng.gen_range(0..3);
        let args = (0..nargs).map(|_| self.expr(depth + 1)).collect();
        Expr::Call {
            recv,
            name: self.rng.gen_range(0..CALL_WORDS.len()),
            args,
        }
    }

    fn expr(&mut self, depth: usize) -> Expr {
        if depth >= 3 {
            return self.leaf();
        }
        match self.exprs.sample(self.rng) {
            0 => self.leaf(),
            1 => {
                let op = *self.ops.choose(self.rng).unwrap();
                Expr::Infix(Box::new(self.expr(depth + 1)), op, Box::new(self.expr(depth + 1)))
            }
            2 => self.call(depth),
            3 => Expr::Not(Box::new(self.expr(depth + 1))),
            _ => Expr::Paren(Box::new(self.expr(depth + 1))),
        }
    }

    fn stmt(&mut self, depth: usize) -> Stmt {
        match self.kinds.sample(self.rng) {
            0 => {
                let ty = self.ty();
                let init = self.rng.gen_bool(0.8).then(|| self.expr(0));
                let var = self.fresh_var();
                self.vars.push(var);
                Stmt::Decl { ty, var, init }
            }
            1 if !self.vars.is_empty() => Stmt::Assign {
                var: *self.vars.choose(self.rng).unwrap(),
                op: ["=", "+=", "-=", "*="].choose(self.rng).unwrap(),
                value: self.expr(0),
            },
            3 if depth < 2 => {
                let cond = self.expr(0);
                let scope = self.vars.len();
                let n = self.rng.gen_range(1..4);
                let then = (0..n).map(|_| self.stmt(depth + 1)).collect();
                self.vars.truncate(scope);
                let els = self.rng.gen_bool(0.4).then(|| {
                    let n = self.rng.gen_range(1..3);
                    let b = (0..n).map(|_| self.stmt(depth + 1)).collect();
                    self.vars.truncate(scope);
                    b
                });
                Stmt::If { cond, then, els }
            }
            _ => Stmt::Call(self.call(0)),
        }
    }
}

/// A random method with `stmts` top-level statements (plus a final return
/// for non-void methods).
pub fn method_spec<R: Rng>(rng: &mut R, stmts: usize) -> MethodSpec {
    let ops = INFIX.choose_multiple(rng, 4).copied().collect();
    let kinds = style(rng, 4);
    let exprs = style(rng, 5);
    // Variable leaves stay a minority, as in typical methods.
    let leaves = WeightedIndex::new([rng.gen_range(1..3), rng.gen_range(1..5), rng.gen_range(0..5), rng.gen_range(0..5), rng.gen_range(0..5)])
        .expect("positive weights");
    let mut g = SpecGen {
        rng,
        vars: Vec::new(),
        next_var: 0,
        ops,
        kinds,
        exprs,
        leaves,
    };
    let nparams = g.rng.gen_range(1..5);
    let params: Vec<(Ty, usize)> = (0..nparams)
        .map(|_| {
            let ty = g.ty();
            let v = g.fresh_var();
            g.vars.push(v);
            (ty, v)
        })
        .collect();
    let mut body: Vec<Stmt> = (0..stmts).map(|_| g.stmt(0)).collect();
    let ret = if g.rng.gen_bool(0.25) { Ty::Void } else { g.ty() };
    if ret != Ty::Void {
        body.push(Stmt::Return(Some(g.expr(0))));
    }
    let name = g.rng.gen_range(0..METHOD_WORDS.len());
    let domain = g.rng.gen_range(0..DOMAIN_WORDS.len() * QUALIFIER_WORDS.len());
    MethodSpec {
        ret,
        name,
        params,
        body,
        domain,
        salt: 0,
    }
}

/// A Type-3 style edit: one top-level statement replaced, or a new one added.
pub fn mutate_spec<R: Rng>(rng: &mut R, spec: &MethodSpec) -> MethodSpec {
    let mut out = spec.clone();
    let extra = {
        let mut g = SpecGen {
            rng,
            vars: spec.params.iter().map(|p| p.1).collect(),
            next_var: 1000,
            ops: INFIX.to_vec(),
            kinds: WeightedIndex::new([1, 1, 1, 1]).expect("positive weights"),
            exprs: WeightedIndex::new([4, 3, 1, 1, 1]).expect("positive weights"),
            leaves: WeightedIndex::new([2, 4, 1, 1, 1]).expect("positive weights"),
        };
        Stmt::Call(g.call(0))
    };
    let pos = rng.gen_range(0..=out.body.len().saturating_sub(1));
    if rng.gen_bool(0.5) && !out.body.is_empty() && !matches!(out.body[pos], Stmt::Decl { .. }) {
        out.body[pos] = extra;
    } else {
        out.body.insert(pos, extra);
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn base_time() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap()
}

fn record(
    project: &str,
    id: String,
    commit: String,
    ts: DateTime<Utc>,
    label: ChangeLabel,
    source: String,
) -> ChangeRecord {
    ChangeRecord {
        change: MethodChange {
            change_id: id,
            project: project.to_string(),
            commit_hash: commit,
            file_path: "src/main/java/App.java".into(),
            method_name: "m".into(),
            timestamp: ts,
            source_text: source,
            ast: None,
        },
        label,
        paired_fix_id: None,
    }
}

/// A project whose later changes are each an identifier-renamed copy of
/// exactly one change from its first month, with the same label.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub records: Vec<ChangeRecord>,
    /// Start of the query changes; everything earlier is history.
    pub queries_from: DateTime<Utc>,
    /// `(query change id, planted original id)`.
    pub planted: Vec<(String, String)>,
}

pub fn planted_corpus(seed: u64, n: usize, project: &str) -> PlantedCorpus {
    let mut rng = rng(seed);
    let t0 = base_time();
    let specs: Vec<MethodSpec> = (0..n)
        .map(|i| {
            let len = rng.gen_range(6..14);
            let mut s = method_spec(&mut rng, len);
            s.salt = i as u32 + 1;
            s
        })
        .collect();
    let labels: Vec<ChangeLabel> = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                ChangeLabel::BugInducing
            } else {
                ChangeLabel::BugFixing
            }
        })
        .collect();
    let mut records = Vec::with_capacity(2 * n);
    for (i, s) in specs.iter().enumerate() {
        let ts = t0 + Duration::minutes(10 * i as i64);
        records.push(record(project, format!("base-{i:04}"), format!("b{i:04}"), ts, labels[i], s.render(Naming::Original)));
    }
    let queries_from = Utc.with_ymd_and_hms(2020, 2, 1, 0, 0, 0).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut planted = Vec::with_capacity(n);
    for (j, &i) in order.iter().enumerate() {
        let ts = queries_from + Duration::hours(6 * j as i64);
        let id = format!("query-{j:04}");
        records.push(record(project, id.clone(), format!("q{j:04}"), ts, labels[i], specs[i].render(Naming::Suffixed("R"))));
        planted.push((id, format!("base-{i:04}")));
    }
    PlantedCorpus {
        records,
        queries_from,
        planted,
    }
}

/// `n` changes spread over `months` months from January 2020, sorted by
/// time. About a third re-use an earlier method (renamed or edited), and
/// some share a timestamp with their predecessor.
pub fn random_corpus(seed: u64, n: usize, months: u32, project: &str) -> Vec<ChangeRecord> {
    let mut rng = rng(seed);
    let span = i64::from(months.max(1)) * 30 * 24 * 60;
    let mut minutes: Vec<i64> = (0..n).map(|_| rng.gen_range(0..span)).collect();
    minutes.sort_unstable();
    for i in 1..n {
        if rng.gen_bool(0.1) {
            minutes[i] = minutes[i - 1];
        }
    }
    let mut specs: Vec<MethodSpec> = Vec::with_capacity(n);
    let mut records = Vec::with_capacity(n);
    for (i, &m) in minutes.iter().enumerate() {
        let spec = if !specs.is_empty() && rng.gen_bool(0.35) {
            let base = specs[rng.gen_range(0..specs.len())].clone();
            if rng.gen_bool(0.5) {
                base
            } else {
                mutate_spec(&mut rng, &base)
            }
        } else {
            let len = rng.gen_range(2..9);
            method_spec(&mut rng, len)
        };
        let naming = if rng.gen_bool(0.5) { Naming::Original } else { Naming::Suffixed("X") };
        let label = if rng.gen_bool(0.5) {
            ChangeLabel::BugInducing
        } else {
            ChangeLabel::BugFixing
        };
        let ts = base_time() + Duration::minutes(m);
        records.push(record(project, format!("c{i:05}"), format!("h{m:08}"), ts, label, spec.render(naming)));
        specs.push(spec);
    }
    records
}

/// History of `n` changes of roughly `stmts` statements each, all in 2020.
pub fn sized_history(seed: u64, n: usize, stmts: usize, project: &str) -> Vec<ChangeRecord> {
    let mut rng = rng(seed);
    let mut records: Vec<ChangeRecord> = (0..n)
        .map(|i| {
            let len = rng.gen_range(stmts / 2..=stmts.max(1));
            let spec = method_spec(&mut rng, len);
            let label = if rng.gen_bool(0.5) {
                ChangeLabel::BugInducing
            } else {
                ChangeLabel::BugFixing
            };
            let ts = base_time() + Duration::minutes(i as i64 * 30);
            record(project, format!("h{i:06}"), format!("c{i:06}"), ts, label, spec.render(Naming::Original))
        })
        .collect();
    records.sort_by_key(|r| r.timestamp);
    records
}

/// Functionality groups of clones. Member 0 of each group is the original;
/// later members cycle through T1 (re-formatted), T2 (renamed), VST3 and ST3
/// (renamed plus one or two edits). Every pair inside a group is a true
/// clone typed by its more distant member; each group also holds `decoys`
/// unrelated methods recorded as false pairs with the original.
pub fn clone_bench(seed: u64, groups: usize, members: usize, decoys: usize) -> CloneBench {
    let mut rng = rng(seed);
    let mut entries = Vec::new();
    let mut truth = CloneTruth::new();
    let variants = [CloneType::T1, CloneType::T2, CloneType::Vst3, CloneType::St3];
    for g in 0..groups {
        let fid = g as u32 + 1;
        let mut base = method_spec(&mut rng, 6 + g % 5);
        base.salt = fid;
        let mut ids: Vec<(String, Option<CloneType>)> = Vec::new();
        for m in 0..members {
            let (text, kind) = if m == 0 {
                (base.render(Naming::Original), None)
            } else {
                let kind = variants[(m - 1) % variants.len()];
                let sfx = format!("V{m}");
                let text = match kind {
                    CloneType::T1 => base.render_reformatted(Naming::Original),
                    CloneType::T2 => base.render(Naming::Suffixed(&sfx)),
                    CloneType::Vst3 => mutate_spec(&mut rng, &base).render(Naming::Suffixed(&sfx)),
                    _ => {
                        let once = mutate_spec(&mut rng, &base);
                        mutate_spec(&mut rng, &once).render(Naming::Suffixed(&sfx))
                    }
                };
                (text, Some(kind))
            };
            let id = format!("f{fid:02}m{m:02}");
            let mut e = CloneBenchEntry::new(fid, id.clone(), text);
            e.project = Some(format!("project{}", m % 3));
            entries.push(e);
            ids.push((id, kind));
        }
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let t = match (ids[a].1, ids[b].1) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => Some(x.max(y)),
                };
                truth.insert(
                    &ids[a].0,
                    &ids[b].0,
                    PairTruth {
                        is_true: true,
                        clone_type: t.or(Some(CloneType::T1)),
                    },
                );
            }
        }
        for d in 0..decoys {
            let mut spec = method_spec(&mut rng, 5);
            spec.salt = 1000 + (g * decoys + d) as u32;
            let id = format!("f{fid:02}x{d:02}");
            let mut e = CloneBenchEntry::new(fid, id.clone(), spec.render(Naming::Original));
            e.project = Some(format!("project{}", d % 3));
            entries.push(e);
            truth.insert(&ids[0].0, &id, PairTruth { is_true: false, clone_type: None });
        }
    }
    entries.sort_by(|a, b| (a.functionality_id, &a.method_id).cmp(&(b.functionality_id, &b.method_id)));
    CloneBench { entries, truth }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_method;

    #[test]
    fn generated_methods_parse() {
        let mut r = rng(7);
        for i in 0..300 {
            let spec = method_spec(&mut r, 1 + i % 12);
            for text in [
                spec.render(Naming::Original),
                spec.render(Naming::Suffixed("R")),
                spec.render_reformatted(Naming::Original),
                mutate_spec(&mut r, &spec).render(Naming::Original),
            ] {
                parse_method(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            }
        }
    }

    #[test]
    fn renaming_preserves_shape_only() {
        let spec = method_spec(&mut rng(3), 6);
        let a = parse_method(&spec.render(Naming::Original)).unwrap();
        let b = parse_method(&spec.render(Naming::Suffixed("R"))).unwrap();
        let c = parse_method(&spec.render_reformatted(Naming::Original)).unwrap();
        assert_eq!(a.node_count(), b.node_count());
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn corpora_are_deterministic_and_sorted() {
        let a = random_corpus(11, 200, 12, "p");
        assert_eq!(a, random_corpus(11, 200, 12, "p"));
        assert!(a.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        let p = planted_corpus(5, 20, "p");
        assert_eq!(p.records.len(), 40);
        assert!(p.records.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        let b = clone_bench(1, 3, 5, 2);
        assert_eq!(b.entries.len(), 21);
        assert_eq!(b.truth.iter().filter(|t| t.2.is_true).count(), 3 * 10);
    }

    #[test]
    fn large_methods_reach_hundreds_of_nodes() {
        let spec = method_spec(&mut rng(9), 45);
        let n = parse_method(&spec.render(Naming::Original)).unwrap().node_count();
        assert!((150..=900).contains(&n), "{n}");
    }
}
