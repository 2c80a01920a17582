//! Sharing equality of λ-terms represented as DAGs, decided in linear time.
//!
//! A [`LamGraph`] is a finite acyclic graph of application, abstraction and
//! variable nodes in which subterms may be shared; each root denotes the
//! locally nameless term obtained by unfolding it ([`readback`]). Given a
//! [`Query`] of root pairs, [`sharing_check`] decides whether every pair
//! unfolds to the same term without ever unfolding anything.
//!
//! ```
//! use shareq_core::{compile_many, parse_surface, sharing_check, Query};
//!
//! let a = parse_surface(r"let d = \x. x x in d d").unwrap();
//! let b = parse_surface(r"(\y. y y) (\z. z z)").unwrap();
//! let (g, roots) = compile_many(&[&a, &b]).unwrap();
//! assert!(sharing_check(&g, &Query::single(roots[0], roots[1])).is_ok());
//! ```

pub mod bench;
pub mod checker;
pub mod generators;
pub mod graph;
pub mod json;
pub mod oracle;
pub mod partition;
pub mod surface;
pub mod term;

pub use checker::{
    blind_check, blind_check_recursive, run_blind, run_check, sharing_check, vars_check, Backend,
    CanonicAssignment, CheckError, CheckReport, CheckStats, Failure, FailureReason, Query,
};
pub use graph::{
    build_graph, build_graph_with, canonical_form, isomorphic, AtomId, AtomTable, BuildOptions,
    Direction, GraphBuilder, GraphError, Label, LamGraph, NodeId, NodeKind, PathError, Trace,
};
pub use oracle::{
    is_blind_sharing_equivalence, is_sharing_equivalence, quotient, readback_equal, spread_query,
    QuotientError,
};
pub use partition::NodePartition;
pub use surface::{
    compile_many, compile_to_graph, inline_lets, parse_surface, to_locally_nameless, CompileError,
    Expr, ParseError,
};
pub use term::{readback, readback_from, term_eq, ReadbackError, Term, TermView, Token};
