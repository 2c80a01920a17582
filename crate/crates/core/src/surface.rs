//! Named surface syntax with non-recursive `let`.
//!
//! ```text
//! e ::= \x. e | let x = e in e | e e | x | ( e )
//! ```
//!
//! `let` is the sharing construct: [`compile_to_graph`] emits the bound
//! expression once and points every use at the same node.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{AtomTable, BuildOptions, GraphBuilder, GraphError, LamGraph, NodeId, NodeKind};
use crate::term::Term;

/// Line and column (both 1-based) of the first character of a construct.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

/// Surface syntax tree. Equality ignores spans.
#[derive(Clone, Debug)]
pub enum Expr {
    Var {
        name: String,
        span: Span,
    },
    App {
        left: Box<Expr>,
        right: Box<Expr>,
        span: Span,
    },
    Lam {
        param: String,
        body: Box<Expr>,
        span: Span,
    },
    Let {
        name: String,
        bound: Box<Expr>,
        body: Box<Expr>,
        span: Span,
    },
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Expr::Var { name: a, .. }, Expr::Var { name: b, .. }) => a == b,
            (
                Expr::App {
                    left: l1,
                    right: r1,
                    ..
                },
                Expr::App {
                    left: l2,
                    right: r2,
                    ..
                },
            ) => l1 == l2 && r1 == r2,
            (
                Expr::Lam {
                    param: p1,
                    body: b1,
                    ..
                },
                Expr::Lam {
                    param: p2,
                    body: b2,
                    ..
                },
            ) => p1 == p2 && b1 == b2,
            (
                Expr::Let {
                    name: n1,
                    bound: e1,
                    body: b1,
                    ..
                },
                Expr::Let {
                    name: n2,
                    bound: e2,
                    body: b2,
                    ..
                },
            ) => n1 == n2 && e1 == e2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var {
            name: name.into(),
            span: Span::default(),
        }
    }

    pub fn app(left: Expr, right: Expr) -> Expr {
        Expr::App {
            left: Box::new(left),
            right: Box::new(right),
            span: Span::default(),
        }
    }

    pub fn lam(param: impl Into<String>, body: Expr) -> Expr {
        Expr::Lam {
            param: param.into(),
            body: Box::new(body),
            span: Span::default(),
        }
    }

    pub fn let_in(name: impl Into<String>, bound: Expr, body: Expr) -> Expr {
        Expr::Let {
            name: name.into(),
            bound: Box::new(bound),
            body: Box::new(body),
            span: Span::default(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Expr::Var { span, .. }
            | Expr::App { span, .. }
            | Expr::Lam { span, .. }
            | Expr::Let { span, .. } => *span,
        }
    }

    /// Number of constructors, `let` included.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var { .. } => 1,
            Expr::App { left, right, .. } => 1 + left.size() + right.size(),
            Expr::Lam { body, .. } => 1 + body.size(),
            Expr::Let { bound, body, .. } => 1 + bound.size() + body.size(),
        }
    }

    pub fn has_let(&self) -> bool {
        match self {
            Expr::Var { .. } => false,
            Expr::App { left, right, .. } => left.has_let() || right.has_let(),
            Expr::Lam { body, .. } => body.has_let(),
            Expr::Let { .. } => true,
        }
    }

    fn collect_names<'a>(&'a self, out: &mut HashSet<&'a str>) {
        match self {
            Expr::Var { name, .. } => {
                out.insert(name);
            }
            Expr::App { left, right, .. } => {
                left.collect_names(out);
                right.collect_names(out);
            }
            Expr::Lam { param, body, .. } => {
                out.insert(param);
                body.collect_names(out);
            }
            Expr::Let {
                name, bound, body, ..
            } => {
                out.insert(name);
                bound.collect_names(out);
                body.collect_names(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(e: &Expr, f: &mut fmt::Formatter<'_>, head: bool, arg: bool, end: bool) -> fmt::Result {
            match e {
                Expr::Var { name, .. } => write!(f, "{name}"),
                Expr::App { left, right, .. } => {
                    if arg {
                        write!(f, "(")?;
                    }
                    go(left, f, true, false, false)?;
                    write!(f, " ")?;
                    go(right, f, false, true, arg || end)?;
                    if arg {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Expr::Lam { param, body, .. } => {
                    let parens = head || (arg && !end);
                    if parens {
                        write!(f, "(")?;
                    }
                    write!(f, "\\{param}. ")?;
                    go(body, f, false, false, true)?;
                    if parens {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Expr::Let {
                    name, bound, body, ..
                } => {
                    let parens = head || (arg && !end);
                    if parens {
                        write!(f, "(")?;
                    }
                    write!(f, "let {name} = ")?;
                    go(bound, f, false, false, true)?;
                    write!(f, " in ")?;
                    go(body, f, false, false, true)?;
                    if parens {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false, false, true)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("ParseError at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Backslash,
    Dot,
    LParen,
    RParen,
    Equals,
    Let,
    In,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Backslash => write!(f, "`\\`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Let => write!(f, "`let`"),
            Tok::In => write!(f, "`in`"),
            Tok::Ident(name) => write!(f, "identifier `{name}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut column = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, column };
        let single = match c {
            '\\' => Some(Tok::Backslash),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            out.push((tok, span));
        } else if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    name.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let tok = match name.as_str() {
                "let" => Tok::Let,
                "in" => Tok::In,
                _ => Tok::Ident(name),
            };
            out.push((tok, span));
        } else {
            return Err(ParseError {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::Eof, Span { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let span = self.span();
        ParseError {
            line: span.line,
            column: span.column,
            message: format!("expected {expected}, found {}", self.peek()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Backslash | Tok::Let => self.binder(),
            _ => self.application(),
        }
    }

    fn binder(&mut self) -> Result<Expr, ParseError> {
        let (tok, span) = self.bump();
        if tok == Tok::Backslash {
            let param = self.ident()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.expr()?;
            Ok(Expr::Lam {
                param,
                body: Box::new(body),
                span,
            })
        } else {
            let name = self.ident()?;
            self.expect(Tok::Equals, "`=`")?;
            let bound = self.expr()?;
            self.expect(Tok::In, "`in`")?;
            let body = self.expr()?;
            Ok(Expr::Let {
                name,
                bound: Box::new(bound),
                body: Box::new(body),
                span,
            })
        }
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        loop {
            let arg = match self.peek() {
                Tok::Ident(_) | Tok::LParen => self.atom()?,
                // A trailing λ or let extends to the end as the last argument.
                Tok::Backslash | Tok::Let => self.binder()?,
                _ => return Ok(acc),
            };
            let span = acc.span();
            acc = Expr::App {
                left: Box::new(acc),
                right: Box::new(arg),
                span,
            };
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok(Expr::Var { name, span })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("an expression")),
        }
    }
}

/// Parses the surface syntax.
pub fn parse_surface(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error("end of input"));
    }
    Ok(e)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("ScopeError: {0}")]
    Scope(GraphError),
}

#[derive(Clone, Copy)]
enum Binding {
    /// λ-bound: the abstraction node and the slot of its variable node.
    Lambda { abs: NodeId, slot: usize },
    Let(NodeId),
}

struct Compiler<'b> {
    builder: &'b mut GraphBuilder,
    scope: Vec<(String, Binding)>,
    var_nodes: Vec<Option<NodeId>>,
}

impl Compiler<'_> {
    fn lookup(&self, name: &str) -> Option<Binding> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, b)| *b)
    }

    fn expr(&mut self, e: &Expr) -> NodeId {
        match e {
            Expr::Var { name, .. } => match self.lookup(name) {
                Some(Binding::Let(node)) => node,
                Some(Binding::Lambda { abs, slot }) => match self.var_nodes[slot] {
                    Some(node) => node,
                    None => {
                        let node = self.builder.bound_var(abs);
                        self.var_nodes[slot] = Some(node);
                        node
                    }
                },
                None => self.builder.free_var(name),
            },
            Expr::App { left, right, .. } => {
                let l = self.expr(left);
                let r = self.expr(right);
                self.builder.app(l, r)
            }
            Expr::Lam { param, body, .. } => {
                let abs = self.builder.reserve();
                let slot = self.var_nodes.len();
                self.var_nodes.push(None);
                self.scope.push((param.clone(), Binding::Lambda { abs, slot }));
                let b = self.expr(body);
                self.scope.pop();
                self.builder.define(abs, NodeKind::Abs { body: b });
                abs
            }
            Expr::Let {
                name, bound, body, ..
            } => {
                let shared = self.expr(bound);
                self.scope.push((name.clone(), Binding::Let(shared)));
                let result = self.expr(body);
                self.scope.pop();
                result
            }
        }
    }
}

/// Adds the nodes of `e` to `builder` and returns its root. Free names are
/// interned in the builder's table, so several expressions compiled into one
/// builder share their free-variable nodes. Unused `let` bindings leave
/// unreachable nodes behind; [`GraphBuilder::build_reachable`] drops them.
pub fn compile_into(builder: &mut GraphBuilder, e: &Expr) -> NodeId {
    let mut compiler = Compiler {
        builder,
        scope: Vec::new(),
        var_nodes: Vec::new(),
    };
    compiler.expr(e)
}

/// Compiles `e` into a validated λ-graph, one node per λ-variable and per free
/// name, one shared node per `let` binding.
pub fn compile_to_graph(e: &Expr) -> Result<(LamGraph, NodeId), CompileError> {
    let mut builder = GraphBuilder::new();
    let root = compile_into(&mut builder, e);
    let (graph, roots) = builder
        .build_reachable(&[root], BuildOptions::default())
        .map_err(CompileError::Scope)?;
    Ok((graph, roots[0]))
}

/// Compiles several expressions into one arena; identical free names map to
/// the same node across all of them.
pub fn compile_many(exprs: &[&Expr]) -> Result<(LamGraph, Vec<NodeId>), CompileError> {
    let mut builder = GraphBuilder::new();
    let roots: Vec<NodeId> = exprs.iter().map(|e| compile_into(&mut builder, e)).collect();
    builder
        .build_reachable(&roots, BuildOptions::default())
        .map_err(CompileError::Scope)
}

/// Direct translation to a locally nameless term, without going through a
/// graph. A `let` is expanded at each use, shifted by the number of binders
/// between the definition and the use.
pub fn to_locally_nameless(e: &Expr, atoms: &mut AtomTable) -> Term {
    enum Scope {
        Lambda(String),
        Let(String, Term, u32),
    }
    fn go(e: &Expr, scope: &mut Vec<Scope>, depth: u32, atoms: &mut AtomTable) -> Term {
        match e {
            Expr::Var { name, .. } => {
                let mut lambdas = 0u32;
                for entry in scope.iter().rev() {
                    match entry {
                        Scope::Lambda(p) if p == name => return Term::bvar(lambdas),
                        Scope::Lambda(_) => lambdas += 1,
                        Scope::Let(n, t, at) if n == name => return t.shift(depth - at),
                        Scope::Let(..) => {}
                    }
                }
                Term::fvar(atoms.intern(name.as_str()))
            }
            Expr::App { left, right, .. } => {
                let l = go(left, scope, depth, atoms);
                let r = go(right, scope, depth, atoms);
                Term::app(l, r)
            }
            Expr::Lam { param, body, .. } => {
                scope.push(Scope::Lambda(param.clone()));
                let b = go(body, scope, depth + 1, atoms);
                scope.pop();
                Term::lam(b)
            }
            Expr::Let {
                name, bound, body, ..
            } => {
                let t = go(bound, scope, depth, atoms);
                scope.push(Scope::Let(name.clone(), t, depth));
                let r = go(body, scope, depth, atoms);
                scope.pop();
                r
            }
        }
    }
    go(e, &mut Vec::new(), 0, atoms)
}

/// Expands every `let` in place.
///
/// Binders are first renamed apart to names that occur nowhere in `e`, so
/// copying a bound expression under other binders cannot capture anything.
/// Free names are left untouched.
pub fn inline_lets(e: &Expr) -> Expr {
    let mut used: HashSet<String> = HashSet::new();
    {
        let mut names = HashSet::new();
        e.collect_names(&mut names);
        used.extend(names.into_iter().map(str::to_string));
    }
    let mut counter = 0usize;
    let mut fresh = |base: &str| loop {
        let candidate = format!("{base}_{counter}");
        counter += 1;
        if !used.contains(&candidate) {
            used.insert(candidate.clone());
            return candidate;
        }
    };

    enum Entry {
        Rename(String, String),
        Inline(String, Expr),
    }
    fn go(e: &Expr, env: &mut Vec<Entry>, fresh: &mut dyn FnMut(&str) -> String) -> Expr {
        match e {
            Expr::Var { name, span } => {
                for entry in env.iter().rev() {
                    match entry {
                        Entry::Rename(old, new) if old == name => {
                            return Expr::Var {
                                name: new.clone(),
                                span: *span,
                            }
                        }
                        Entry::Inline(n, body) if n == name => return body.clone(),
                        _ => {}
                    }
                }
                e.clone()
            }
            Expr::App { left, right, span } => Expr::App {
                left: Box::new(go(left, env, fresh)),
                right: Box::new(go(right, env, fresh)),
                span: *span,
            },
            Expr::Lam { param, body, span } => {
                let renamed = fresh(param);
                env.push(Entry::Rename(param.clone(), renamed.clone()));
                let b = go(body, env, fresh);
                env.pop();
                Expr::Lam {
                    param: renamed,
                    body: Box::new(b),
                    span: *span,
                }
            }
            Expr::Let {
                name, bound, body, ..
            } => {
                let expanded = go(bound, env, fresh);
                env.push(Entry::Inline(name.clone(), expanded));
                let r = go(body, env, fresh);
                env.pop();
                r
            }
        }
    }
    go(e, &mut Vec::new(), &mut fresh)
}

/// Counts uses of each free name; handy for diagnostics.
pub fn free_names(e: &Expr) -> HashMap<String, usize> {
    fn go<'a>(e: &'a Expr, bound: &mut Vec<&'a str>, out: &mut HashMap<String, usize>) {
        match e {
            Expr::Var { name, .. } => {
                if !bound.contains(&name.as_str()) {
                    *out.entry(name.clone()).or_default() += 1;
                }
            }
            Expr::App { left, right, .. } => {
                go(left, bound, out);
                go(right, bound, out);
            }
            Expr::Lam { param, body, .. } => {
                bound.push(param);
                go(body, bound, out);
                bound.pop();
            }
            Expr::Let {
                name, bound: b, body, ..
            } => {
                go(b, bound, out);
                bound.push(name);
                go(body, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = HashMap::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{readback, term_eq};

    fn parse(s: &str) -> Expr {
        parse_surface(s).unwrap()
    }

    #[test]
    fn parses_shared_w_term() {
        let e = parse("(\\x. x (\\y. w)) ((\\y. w) w)");
        let expected = Expr::app(
            Expr::lam("x", Expr::app(Expr::var("x"), Expr::lam("y", Expr::var("w")))),
            Expr::app(Expr::lam("y", Expr::var("w")), Expr::var("w")),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn parses_variable_and_let() {
        assert_eq!(parse("x"), Expr::var("x"));
        assert_eq!(
            parse("let d = x x in d d"),
            Expr::let_in(
                "d",
                Expr::app(Expr::var("x"), Expr::var("x")),
                Expr::app(Expr::var("d"), Expr::var("d"))
            )
        );
    }

    #[test]
    fn application_is_left_associative_and_lambda_extends_right() {
        assert_eq!(
            parse("a b c"),
            Expr::app(Expr::app(Expr::var("a"), Expr::var("b")), Expr::var("c"))
        );
        assert_eq!(
            parse("\\x. x y"),
            Expr::lam("x", Expr::app(Expr::var("x"), Expr::var("y")))
        );
        assert_eq!(
            parse("f \\x. x y"),
            Expr::app(
                Expr::var("f"),
                Expr::lam("x", Expr::app(Expr::var("x"), Expr::var("y")))
            )
        );
        assert_eq!(parse("  x'_1  \n"), Expr::var("x'_1"));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_surface("\\x x").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        let err = parse_surface("(a\n b").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_surface("let in").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(parse_surface("a ) b").is_err());
        assert!(parse_surface("λx. x").is_err());
        assert!(parse_surface("").is_err());
    }

    #[test]
    fn display_roundtrips() {
        for src in [
            "(\\x. x \\y. w) ((\\y. w) w)",
            "f (\\x. x) \\y. y",
            "let d = x x in d (let e = d in e) z",
            "let d = x x in d let e = d in e",
            "a (b c) d",
        ] {
            let e = parse(src);
            assert_eq!(e.to_string(), src);
            assert_eq!(parse(&e.to_string()), e);
        }
    }

    #[test]
    fn maximally_shared_delta_delta() {
        let e = parse("let y = (\\x. let s = x x in s s) in y y");
        let (g, root) = compile_to_graph(&e).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.roots(), &[root]);
        let mut atoms = AtomTable::new();
        let direct = to_locally_nameless(&parse("(\\x.(x x)(x x))(\\x.(x x)(x x))"), &mut atoms);
        assert!(term_eq(&readback(&g, root, 1000).unwrap(), &direct));
    }

    #[test]
    fn single_variable_graph() {
        let (g, root) = compile_to_graph(&parse("x")).unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(matches!(g.kind(root), NodeKind::FreeVar { .. }));
    }

    #[test]
    fn let_shared_free_application_under_shadowing_binder() {
        // The free `x` of the shared `x x` and the λ-bound `x` are distinct
        // (the λ-bound one is unused, so it has no node at all).
        let (g, root) = compile_to_graph(&parse("let s = x x in (\\x. s) s")).unwrap();
        assert_eq!(g.node_count(), 4);
        assert!(g.validate_dominated().is_ok());
        let t = readback(&g, root, 100).unwrap();
        let mut atoms = g.atoms().clone();
        let expected = to_locally_nameless(&parse("(\\z. x x) (x x)"), &mut atoms);
        assert_eq!(t, expected);
    }

    #[test]
    fn unused_lets_are_dropped() {
        let (g, root) = compile_to_graph(&parse("\\x. let s = x x in x")).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.roots(), &[root]);
    }

    #[test]
    fn compile_many_shares_free_names() {
        let a = parse("x y");
        let b = parse("y x");
        let (g, roots) = compile_many(&[&a, &b]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn locally_nameless_translation_shifts_lets() {
        let mut atoms = AtomTable::new();
        // \x. let s = x in \y. s  ==  \x. \y. x  ==  λλ1
        let t = to_locally_nameless(&parse("\\x. let s = x in \\y. s"), &mut atoms);
        assert_eq!(t, Term::lam(Term::lam(Term::bvar(1))));
    }

    #[test]
    fn inlining_avoids_capture() {
        let e = parse("\\x. let s = x in \\x. s");
        let inlined = inline_lets(&e);
        assert!(!inlined.has_let());
        let mut atoms = AtomTable::new();
        assert_eq!(
            to_locally_nameless(&inlined, &mut atoms),
            to_locally_nameless(&e, &mut atoms)
        );
        assert_eq!(
            to_locally_nameless(&inlined, &mut atoms),
            Term::lam(Term::lam(Term::bvar(1)))
        );
    }

    #[test]
    fn free_name_counts() {
        let counts = free_names(&parse("\\x. x y (let z = y in z w)"));
        assert_eq!(counts.get("y"), Some(&2));
        assert_eq!(counts.get("w"), Some(&1));
        assert!(!counts.contains_key("x"));
        assert!(!counts.contains_key("z"));
    }
}
