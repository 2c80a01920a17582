//! Locally nameless λ-terms and the readback of λ-graph roots into them.
//!
//! A [`Term`] is stored as its preorder token sequence. Since every token has a
//! fixed arity the sequence determines the tree, so syntactic equality (which
//! is α-equivalence for locally nameless terms) is plain sequence equality.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{AtomId, AtomTable, LamGraph, NodeId, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    /// Bound variable with its de Bruijn index.
    BVar(u32),
    FVar(AtomId),
    App,
    Lam,
}

impl Token {
    fn arity(self) -> usize {
        match self {
            Token::BVar(_) | Token::FVar(_) => 0,
            Token::Lam => 1,
            Token::App => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    tokens: Vec<Token>,
}

/// Borrowed subterm: a slice of tokens that forms exactly one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TermRef<'a> {
    tokens: &'a [Token],
}

/// One layer of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermView<'a> {
    BVar(u32),
    FVar(AtomId),
    App(TermRef<'a>, TermRef<'a>),
    Lam(TermRef<'a>),
}

impl Term {
    pub fn bvar(index: u32) -> Term {
        Term {
            tokens: vec![Token::BVar(index)],
        }
    }

    pub fn fvar(atom: AtomId) -> Term {
        Term {
            tokens: vec![Token::FVar(atom)],
        }
    }

    pub fn app(left: Term, right: Term) -> Term {
        let mut tokens = Vec::with_capacity(1 + left.tokens.len() + right.tokens.len());
        tokens.push(Token::App);
        tokens.extend_from_slice(&left.tokens);
        tokens.extend_from_slice(&right.tokens);
        Term { tokens }
    }

    pub fn lam(body: Term) -> Term {
        let mut tokens = Vec::with_capacity(1 + body.tokens.len());
        tokens.push(Token::Lam);
        tokens.extend_from_slice(&body.tokens);
        Term { tokens }
    }

    /// Wraps a well-formed preorder token sequence.
    pub fn from_tokens(tokens: Vec<Token>) -> Option<Term> {
        let mut missing = 1usize;
        for t in &tokens {
            if missing == 0 {
                return None;
            }
            missing = missing - 1 + t.arity();
        }
        (missing == 0).then_some(Term { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn as_ref(&self) -> TermRef<'_> {
        TermRef {
            tokens: &self.tokens,
        }
    }

    pub fn view(&self) -> TermView<'_> {
        self.as_ref().view()
    }

    /// Adds `by` to every bound index that escapes the term.
    pub fn shift(&self, by: u32) -> Term {
        if by == 0 {
            return self.clone();
        }
        let mut tokens = self.tokens.clone();
        for_each_with_depth(&self.tokens, |i, depth| {
            if let Token::BVar(k) = self.tokens[i] {
                if k >= depth {
                    tokens[i] = Token::BVar(k + by);
                }
            }
        });
        Term { tokens }
    }

    /// Whether every bound index refers to an enclosing `Lam`.
    pub fn is_locally_closed(&self) -> bool {
        let mut closed = true;
        for_each_with_depth(&self.tokens, |i, depth| {
            if let Token::BVar(k) = self.tokens[i] {
                closed &= k < depth;
            }
        });
        closed
    }

    /// Pretty-prints in surface syntax, binders named `x0, x1, …` by depth.
    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        Named { term: self, atoms }
    }

    /// Prints indices instead of names, e.g. `\. \. 1`.
    pub fn display_nameless<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        Nameless { term: self, atoms }
    }
}

/// Syntactic equality of locally nameless terms.
pub fn term_eq(t: &Term, s: &Term) -> bool {
    t.tokens == s.tokens
}

/// Calls `f(position, lam_depth)` for every token in preorder, where
/// `lam_depth` counts the `Lam` tokens enclosing that position.
pub(crate) fn for_each_with_depth(tokens: &[Token], mut f: impl FnMut(usize, u32)) {
    // Each frame: remaining children, and whether it is a Lam.
    let mut frames: Vec<(usize, bool)> = Vec::new();
    let mut depth = 0u32;
    for (i, &tok) in tokens.iter().enumerate() {
        f(i, depth);
        match tok {
            Token::Lam => {
                depth += 1;
                frames.push((1, true));
            }
            Token::App => frames.push((2, false)),
            Token::BVar(_) | Token::FVar(_) => {
                // A completed leaf finishes every frame whose last child it was.
                while let Some(top) = frames.last_mut() {
                    top.0 -= 1;
                    if top.0 > 0 {
                        break;
                    }
                    if top.1 {
                        depth -= 1;
                    }
                    frames.pop();
                }
            }
        }
    }
}

impl<'a> TermRef<'a> {
    pub fn tokens(self) -> &'a [Token] {
        self.tokens
    }

    pub fn to_term(self) -> Term {
        Term {
            tokens: self.tokens.to_vec(),
        }
    }

    pub fn view(self) -> TermView<'a> {
        match self.tokens[0] {
            Token::BVar(i) => TermView::BVar(i),
            Token::FVar(a) => TermView::FVar(a),
            Token::Lam => TermView::Lam(TermRef {
                tokens: &self.tokens[1..],
            }),
            Token::App => {
                let split = 1 + subterm_len(&self.tokens[1..]);
                TermView::App(
                    TermRef {
                        tokens: &self.tokens[1..split],
                    },
                    TermRef {
                        tokens: &self.tokens[split..],
                    },
                )
            }
        }
    }
}

fn subterm_len(tokens: &[Token]) -> usize {
    let mut missing = 1usize;
    for (i, t) in tokens.iter().enumerate() {
        missing = missing - 1 + t.arity();
        if missing == 0 {
            return i + 1;
        }
    }
    tokens.len()
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReadbackError {
    #[error("NotARoot: node {0} is not a root")]
    NotARoot(NodeId),
    #[error("LimitExceeded: unfolded term exceeds {limit} constructors")]
    LimitExceeded { limit: usize },
    #[error("NotCrossed: bound variable {var} reached without crossing binder {binder}")]
    NotCrossed { var: NodeId, binder: NodeId },
}

/// Unfolds `root` into the locally nameless term it denotes.
///
/// Fails with `LimitExceeded` as soon as the term would have more than
/// `limit` constructors. Indices are computed from the depth at which each
/// binder was entered on the current access path.
pub fn readback(g: &LamGraph, root: NodeId, limit: usize) -> Result<Term, ReadbackError> {
    if !g.is_root(root) {
        return Err(ReadbackError::NotARoot(root));
    }
    readback_from(g, root, limit)
}

/// Readback from an arbitrary node; bound variables whose binder is not on
/// the access path yield `NotCrossed`.
pub fn readback_from(g: &LamGraph, start: NodeId, limit: usize) -> Result<Term, ReadbackError> {
    enum Work {
        Enter(NodeId),
        Leave(NodeId),
    }
    const OUTSIDE: u32 = u32::MAX;
    let mut entered_at = vec![OUTSIDE; g.node_count()];
    let mut depth = 0u32;
    let mut tokens = Vec::new();
    let mut stack = vec![Work::Enter(start)];
    while let Some(work) = stack.pop() {
        match work {
            Work::Leave(abs) => {
                entered_at[abs.index()] = OUTSIDE;
                depth -= 1;
            }
            Work::Enter(node) => {
                if tokens.len() == limit {
                    return Err(ReadbackError::LimitExceeded { limit });
                }
                match g.kind(node) {
                    NodeKind::BoundVar { binder } => {
                        let at = entered_at[binder.index()];
                        if at == OUTSIDE {
                            return Err(ReadbackError::NotCrossed { var: node, binder });
                        }
                        tokens.push(Token::BVar(depth - at - 1));
                    }
                    NodeKind::FreeVar { atom } => tokens.push(Token::FVar(atom)),
                    NodeKind::Abs { body } => {
                        tokens.push(Token::Lam);
                        entered_at[node.index()] = depth;
                        depth += 1;
                        stack.push(Work::Leave(node));
                        stack.push(Work::Enter(body));
                    }
                    NodeKind::App { left, right } => {
                        tokens.push(Token::App);
                        stack.push(Work::Enter(right));
                        stack.push(Work::Enter(left));
                    }
                }
            }
        }
    }
    Ok(Term { tokens })
}

struct Named<'a> {
    term: &'a Term,
    atoms: &'a AtomTable,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: HashSet<&str> = self
            .term
            .tokens
            .iter()
            .filter_map(|t| match t {
                Token::FVar(a) => Some(self.atoms.name(*a)),
                _ => None,
            })
            .collect();
        // Binder names must not capture a free variable.
        let mut suffix = String::new();
        while free.iter().any(|n| is_machine_name(n, &suffix)) {
            suffix.push('\'');
        }
        let mut printer = Printer {
            atoms: self.atoms,
            suffix: &suffix,
            nameless: false,
        };
        printer.term(f, self.term.as_ref(), 0, Position::End)
    }
}

fn is_machine_name(name: &str, suffix: &str) -> bool {
    name.strip_prefix('x')
        .and_then(|rest| rest.strip_suffix(suffix))
        .is_some_and(|digits| {
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        })
}

struct Nameless<'a> {
    term: &'a Term,
    atoms: &'a AtomTable,
}

impl fmt::Display for Nameless<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut printer = Printer {
            atoms: self.atoms,
            suffix: "",
            nameless: true,
        };
        printer.term(f, self.term.as_ref(), 0, Position::End)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    /// Function part of an application.
    Head,
    /// Argument that is followed by more text.
    Arg,
    /// Nothing follows; a λ may extend to the end.
    End,
    /// Final argument of an application that is itself at the end.
    LastArg,
}

struct Printer<'a> {
    atoms: &'a AtomTable,
    suffix: &'a str,
    nameless: bool,
}

impl Printer<'_> {
    fn term(
        &mut self,
        f: &mut fmt::Formatter<'_>,
        t: TermRef<'_>,
        depth: u32,
        pos: Position,
    ) -> fmt::Result {
        match t.view() {
            TermView::BVar(i) => {
                if self.nameless {
                    write!(f, "{i}")
                } else {
                    write!(f, "x{}{}", depth - i - 1, self.suffix)
                }
            }
            TermView::FVar(a) => write!(f, "{}", self.atoms.name(a)),
            TermView::Lam(body) => {
                let parens = matches!(pos, Position::Head | Position::Arg);
                if parens {
                    write!(f, "(")?;
                }
                if self.nameless {
                    write!(f, "\\. ")?;
                } else {
                    write!(f, "\\x{}{}. ", depth, self.suffix)?;
                }
                self.term(f, body, depth + 1, Position::End)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            TermView::App(left, right) => {
                let parens = matches!(pos, Position::Arg | Position::LastArg);
                if parens {
                    write!(f, "(")?;
                }
                self.term(f, left, depth, Position::Head)?;
                write!(f, " ")?;
                let arg_pos = if parens || pos == Position::End {
                    Position::LastArg
                } else {
                    Position::Arg
                };
                self.term(f, right, depth, arg_pos)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}
