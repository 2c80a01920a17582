//! The linear-time sharing-equality check.
//!
//! Checking runs in two phases. The blind check ([`blind_check`], or the
//! [`blind_check_recursive`] backend) propagates the query down the graph,
//! assigning every node a canonic representative of its class and failing as
//! soon as a class would need two different labels or would be its own
//! ancestor. The variables check ([`vars_check`]) then makes sure equated free
//! variables are the same node and equated bound variables have equated
//! binders. [`sharing_check`] composes both.
//!
//! Every run counts its transitions (roughly, executed pseudocode lines) and
//! tracks the size of the query-edge multiset, so that the linear bounds can be
//! checked empirically.

mod blind;
mod recursive;

use std::fmt;

use thiserror::Error;

use crate::graph::{LamGraph, NodeId};
use crate::partition::NodePartition;

/// A multiset of unordered pairs of roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pairs: Vec<(NodeId, NodeId)>,
}

impl Query {
    pub fn new(pairs: Vec<(NodeId, NodeId)>) -> Self {
        Query { pairs }
    }

    pub fn empty() -> Self {
        Query::default()
    }

    pub fn single(a: NodeId, b: NodeId) -> Self {
        Query { pairs: vec![(a, b)] }
    }

    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every endpoint must be a root of `g`.
    pub fn validate(&self, g: &LamGraph) -> Result<(), CheckError> {
        for &(a, b) in &self.pairs {
            for n in [a, b] {
                if !g.is_root(n) {
                    return Err(CheckError::NonRootQuery(n));
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(NodeId, NodeId)> for Query {
    fn from_iter<I: IntoIterator<Item = (NodeId, NodeId)>>(iter: I) -> Self {
        Query::new(iter.into_iter().collect())
    }
}

/// Why a check failed. Each reason corresponds to one failing line of the
/// algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// A parent of the node being processed belongs to a class still under
    /// construction: the classes form a cycle.
    ParentStillBuilding,
    /// A query sibling was already assigned to another class.
    SiblingInOtherClass,
    /// Two nodes with different labels would share a class.
    NotHomogeneous,
    /// Two distinct free variables would share a class (or a free variable
    /// and a bound one).
    FreeVarsDistinct,
    /// Two equated bound variables have binders in different classes.
    BindersNotEquated,
}

impl FailureReason {
    pub fn name(self) -> &'static str {
        match self {
            FailureReason::ParentStillBuilding => "ParentStillBuilding",
            FailureReason::SiblingInOtherClass => "SiblingInOtherClass",
            FailureReason::NotHomogeneous => "NotHomogeneous",
            FailureReason::FreeVarsDistinct => "FreeVarsDistinct",
            FailureReason::BindersNotEquated => "BindersNotEquated",
        }
    }

    /// Whether the reason comes from the blind phase.
    pub fn is_blind(self) -> bool {
        matches!(
            self,
            FailureReason::ParentStillBuilding
                | FailureReason::SiblingInOtherClass
                | FailureReason::NotHomogeneous
        )
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
#[error("{reason} at node {node} (against node {other})")]
pub struct Failure {
    pub reason: FailureReason,
    /// The node being processed when the check failed.
    pub node: NodeId,
    /// The parent, sibling or canonic it was compared with.
    pub other: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("NonRootQuery: node {0} is not a root")]
    NonRootQuery(NodeId),
    #[error(transparent)]
    Failed(#[from] Failure),
}

impl CheckError {
    pub fn failure(&self) -> Option<Failure> {
        match self {
            CheckError::Failed(f) => Some(*f),
            CheckError::NonRootQuery(_) => None,
        }
    }
}

/// Canonic representative of every node, as produced by a successful blind
/// check. Idempotent: the canonic of a canonic is itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicAssignment {
    canonic: Vec<NodeId>,
}

impl CanonicAssignment {
    pub fn canonic(&self, n: NodeId) -> NodeId {
        self.canonic[n.index()]
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.canonic
    }

    pub fn class_count(&self) -> usize {
        self.canonic
            .iter()
            .enumerate()
            .filter(|(i, c)| c.index() == *i)
            .count()
    }

    pub fn is_idempotent(&self) -> bool {
        self.canonic.iter().all(|c| self.canonic[c.index()] == *c)
    }

    /// The induced same-canonic partition.
    pub fn partition(&self) -> NodePartition {
        NodePartition::from_representatives(&self.canonic)
    }
}

/// Which blind-check implementation to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Per-class queues.
    #[default]
    Queue,
    /// Per-node visiting flags, no queues.
    Recursive,
}

/// Instrumentation gathered during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub nodes: usize,
    pub edges: usize,
    pub query_pairs: usize,
    /// Executed steps of the blind and variables phases.
    pub transitions: u64,
    /// Largest size reached by the query-edge multiset, counting each
    /// undirected edge in both directions.
    pub max_query_edges: usize,
    /// Assignments to an already assigned canonic (must stay zero).
    pub canonic_rewrites: u64,
    /// Pushes of a node already pushed once (must stay zero).
    pub repeated_enqueues: u64,
}

impl CheckStats {
    fn new(g: &LamGraph, q: &Query) -> Self {
        CheckStats {
            nodes: g.node_count(),
            edges: g.edge_count(),
            query_pairs: q.len(),
            ..Default::default()
        }
    }

    /// `2|Q| + 4|N|`, the bound on the query-edge multiset.
    pub fn query_edge_bound(&self) -> usize {
        2 * self.query_pairs + 4 * self.nodes
    }

    /// `|N| + |E| + |Q|`.
    pub fn input_size(&self) -> usize {
        self.nodes + self.edges + self.query_pairs
    }

    pub fn invariants_hold(&self) -> bool {
        self.canonic_rewrites == 0
            && self.repeated_enqueues == 0
            && self.max_query_edges <= self.query_edge_bound()
    }
}

/// Result of a full run with instrumentation.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub outcome: Result<CanonicAssignment, CheckError>,
    pub stats: CheckStats,
}

impl CheckReport {
    pub fn is_equal(&self) -> bool {
        self.outcome.is_ok()
    }
}

const NIL: u32 = u32::MAX;

/// The query-edge multiset as per-node singly linked adjacency lists in one
/// pool. Entries are appended and never removed.
pub(crate) struct QueryEdges {
    head: Vec<u32>,
    tail: Vec<u32>,
    target: Vec<NodeId>,
    next: Vec<u32>,
}

impl QueryEdges {
    pub(crate) fn new(nodes: usize, capacity: usize) -> Self {
        QueryEdges {
            head: vec![NIL; nodes],
            tail: vec![NIL; nodes],
            target: Vec::with_capacity(capacity),
            next: Vec::with_capacity(capacity),
        }
    }

    fn push_half(&mut self, from: NodeId, to: NodeId) {
        let entry = self.target.len() as u32;
        self.target.push(to);
        self.next.push(NIL);
        let f = from.index();
        if self.tail[f] == NIL {
            self.head[f] = entry;
        } else {
            self.next[self.tail[f] as usize] = entry;
        }
        self.tail[f] = entry;
    }

    /// Adds the undirected edge `a ~ b`; a loop appears twice in one list.
    pub(crate) fn add(&mut self, a: NodeId, b: NodeId) {
        self.push_half(a, b);
        self.push_half(b, a);
    }

    /// Entry following `prev` in the list of `n` (`NIL` for the first).
    #[inline]
    pub(crate) fn after(&self, n: NodeId, prev: u32) -> u32 {
        if prev == NIL {
            self.head[n.index()]
        } else {
            self.next[prev as usize]
        }
    }

    #[inline]
    pub(crate) fn target(&self, entry: u32) -> NodeId {
        self.target[entry as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.target.len()
    }
}

/// Runs the blind check with the per-class queue algorithm.
pub fn blind_check(g: &LamGraph, q: &Query) -> Result<CanonicAssignment, CheckError> {
    run_blind(g, q, Backend::Queue).0
}

/// Runs the blind check with the visiting-flag, queue-free algorithm. Agrees
/// with [`blind_check`] on the verdict and, on success, on the partition.
pub fn blind_check_recursive(g: &LamGraph, q: &Query) -> Result<CanonicAssignment, CheckError> {
    run_blind(g, q, Backend::Recursive).0
}

/// Blind phase only, with instrumentation.
pub fn run_blind(
    g: &LamGraph,
    q: &Query,
    backend: Backend,
) -> (Result<CanonicAssignment, CheckError>, CheckStats) {
    let mut stats = CheckStats::new(g, q);
    if let Err(e) = q.validate(g) {
        return (Err(e), stats);
    }
    let outcome = match backend {
        Backend::Queue => blind::run(g, q, &mut stats),
        Backend::Recursive => recursive::run(g, q, &mut stats),
    };
    (outcome.map_err(CheckError::Failed), stats)
}

/// Checks the variable conditions on the result of a successful blind check:
/// equated free variables must be the same node, and equated bound variables
/// must have equated binders.
pub fn vars_check(g: &LamGraph, can: &CanonicAssignment) -> Result<(), Failure> {
    let mut transitions = 0;
    vars_check_counted(g, can, &mut transitions)
}

fn vars_check_counted(
    g: &LamGraph,
    can: &CanonicAssignment,
    transitions: &mut u64,
) -> Result<(), Failure> {
    for v in g.node_ids() {
        let kind = g.kind(v);
        if !kind.is_var() {
            continue;
        }
        *transitions += 1;
        let w = can.canonic(v);
        if v == w {
            continue;
        }
        *transitions += 1;
        match (kind.binder(), g.kind(w).binder()) {
            (Some(bv), Some(bw)) => {
                if can.canonic(bv) != can.canonic(bw) {
                    return Err(Failure {
                        reason: FailureReason::BindersNotEquated,
                        node: v,
                        other: w,
                    });
                }
            }
            _ => {
                return Err(Failure {
                    reason: FailureReason::FreeVarsDistinct,
                    node: v,
                    other: w,
                })
            }
        }
    }
    Ok(())
}

/// Both phases with instrumentation.
pub fn run_check(g: &LamGraph, q: &Query, backend: Backend) -> CheckReport {
    let (blind, mut stats) = run_blind(g, q, backend);
    let outcome = blind.and_then(|can| {
        vars_check_counted(g, &can, &mut stats.transitions)
            .map(|()| can)
            .map_err(CheckError::Failed)
    });
    CheckReport { outcome, stats }
}

/// Decides whether every queried pair of roots reads back to the same term.
/// On success returns the smallest sharing equivalence containing the query.
pub fn sharing_check(g: &LamGraph, q: &Query) -> Result<NodePartition, CheckError> {
    run_check(g, q, Backend::Queue)
        .outcome
        .map(|can| can.partition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, AtomId, NodeKind};
    use crate::surface::{compile_many, parse_surface};

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn both(g: &LamGraph, q: &Query) -> [CheckReport; 2] {
        [run_check(g, q, Backend::Queue), run_check(g, q, Backend::Recursive)]
    }

    fn arena(srcs: &[&str]) -> (LamGraph, Vec<NodeId>) {
        let exprs: Vec<_> = srcs.iter().map(|s| parse_surface(s).unwrap()).collect();
        let refs: Vec<_> = exprs.iter().collect();
        compile_many(&refs).unwrap()
    }

    #[test]
    fn reflexive_query_succeeds_with_singletons() {
        let (g, roots) = arena(&["(\\x. x (let l = \\y. w in l)) (let l = \\y. w in l w)"]);
        for report in both(&g, &Query::single(roots[0], roots[0])) {
            let can = report.outcome.unwrap();
            assert_eq!(can.class_count(), g.node_count());
            assert!(can.is_idempotent());
        }
    }

    #[test]
    fn empty_query_is_identity() {
        let (g, _) = arena(&["\\x. x x"]);
        let p = sharing_check(&g, &Query::empty()).unwrap();
        assert_eq!(p, NodePartition::identity(g.node_count()));
    }

    #[test]
    fn kind_mismatch_is_not_homogeneous() {
        let (g, roots) = arena(&["\\x. x", "y y"]);
        for report in both(&g, &Query::single(roots[0], roots[1])) {
            let failure = report.outcome.unwrap_err().failure().unwrap();
            assert_eq!(failure.reason, FailureReason::NotHomogeneous);
        }
    }

    #[test]
    fn non_root_endpoint_is_rejected() {
        let (g, roots) = arena(&["\\x. x"]);
        let body = match g.kind(roots[0]) {
            NodeKind::Abs { body } => body,
            _ => unreachable!(),
        };
        assert_eq!(
            sharing_check(&g, &Query::single(roots[0], body)),
            Err(CheckError::NonRootQuery(body))
        );
        assert_eq!(
            sharing_check(&g, &Query::single(roots[0], n(99))),
            Err(CheckError::NonRootQuery(n(99)))
        );
    }

    #[test]
    fn two_identities_share_binders() {
        // Two separate λ.0 graphs queried on their abstractions.
        let g = build_graph(
            vec![
                (n(0), NodeKind::Abs { body: n(1) }),
                (n(1), NodeKind::BoundVar { binder: n(0) }),
                (n(2), NodeKind::Abs { body: n(3) }),
                (n(3), NodeKind::BoundVar { binder: n(2) }),
            ],
            vec![],
        )
        .unwrap();
        let q = Query::single(n(0), n(2));
        let can = blind_check(&g, &q).unwrap();
        assert_eq!(can.canonic(n(2)), can.canonic(n(0)));
        assert_eq!(can.canonic(n(3)), can.canonic(n(1)));
        assert_eq!(vars_check(&g, &can), Ok(()));
        assert_eq!(can.partition(), NodePartition::from_labels(&[0, 1, 0, 1]));
    }

    #[test]
    fn distinct_free_variables() {
        let g = build_graph(
            vec![
                (n(0), NodeKind::FreeVar { atom: AtomId(0) }),
                (n(1), NodeKind::FreeVar { atom: AtomId(1) }),
            ],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let q = Query::single(n(0), n(1));
        let can = blind_check(&g, &q).unwrap();
        assert_eq!(vars_check(&g, &can).unwrap_err().reason, FailureReason::FreeVarsDistinct);
        for report in both(&g, &q) {
            assert_eq!(
                report.outcome.unwrap_err().failure().unwrap().reason,
                FailureReason::FreeVarsDistinct
            );
        }
    }

    #[test]
    fn bound_against_free_is_not_homogeneous() {
        // λ.(0 x) against λ.(x 0): the blind phase pairs a bound variable with
        // the free one.
        let (g, roots) = arena(&["\\z. z x", "\\z. x z"]);
        for report in both(&g, &Query::single(roots[0], roots[1])) {
            let f = report.outcome.unwrap_err().failure().unwrap();
            assert_eq!(f.reason, FailureReason::NotHomogeneous);
        }
    }

    #[test]
    fn binders_not_equated() {
        // λx.λy.x against λx.λy.y: bound variables with different binders.
        let (g, roots) = arena(&["\\x. \\y. x", "\\x. \\y. y"]);
        for report in both(&g, &Query::single(roots[0], roots[1])) {
            let f = report.outcome.unwrap_err().failure().unwrap();
            assert_eq!(f.reason, FailureReason::BindersNotEquated);
        }
    }

    #[test]
    fn class_would_contain_its_own_child() {
        // Roots App(a, a) and App(x, x) with a = App(x, x): relating them
        // relates a with its own child x.
        let g = build_graph(
            vec![
                (n(0), NodeKind::FreeVar { atom: AtomId(0) }),
                (n(1), NodeKind::App { left: n(0), right: n(0) }),
                (n(2), NodeKind::App { left: n(1), right: n(1) }),
                (n(3), NodeKind::App { left: n(0), right: n(0) }),
            ],
            vec!["x".into()],
        )
        .unwrap();
        assert_eq!(g.roots(), &[n(2), n(3)]);
        for report in both(&g, &Query::single(n(2), n(3))) {
            let f = report.outcome.unwrap_err().failure().unwrap();
            assert!(f.reason.is_blind(), "{f:?}");
        }
        // Whereas the genuinely equal pair succeeds.
        let g2 = build_graph(
            vec![
                (n(0), NodeKind::FreeVar { atom: AtomId(0) }),
                (n(1), NodeKind::App { left: n(0), right: n(0) }),
                (n(2), NodeKind::App { left: n(1), right: n(1) }),
                (n(3), NodeKind::App { left: n(0), right: n(0) }),
                (n(4), NodeKind::App { left: n(3), right: n(1) }),
            ],
            vec!["x".into()],
        )
        .unwrap();
        assert!(sharing_check(&g2, &Query::single(n(2), n(4))).is_ok());
    }

    #[test]
    fn delta_delta_shared_against_copy() {
        let src = "let y = (\\x. let s = x x in s s) in y y";
        let (g, roots) = arena(&[src, src]);
        assert_eq!(g.node_count(), 10);
        for report in both(&g, &Query::single(roots[0], roots[1])) {
            let p = report.outcome.unwrap().partition();
            assert_eq!(p.class_count(), 5);
            assert!(report.stats.invariants_hold());
        }
    }

    #[test]
    fn stats_are_populated() {
        let (g, roots) = arena(&["\\x. x", "\\y. y"]);
        let report = run_check(&g, &Query::single(roots[0], roots[1]), Backend::Queue);
        assert!(report.is_equal());
        let s = report.stats;
        assert_eq!((s.nodes, s.edges, s.query_pairs), (4, 2, 1));
        assert!(s.transitions > 0);
        // One undirected root edge plus one propagated body edge.
        assert_eq!(s.max_query_edges, 4);
        assert!(s.max_query_edges <= s.query_edge_bound());
    }
}
