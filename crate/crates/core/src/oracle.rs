//! Brute-force reference implementations: the spreading closure of a relation,
//! the (blind) sharing-equivalence predicates, quotient graphs, and readback
//! comparison. These favour obviousness over speed and serve as ground truth
//! for the checker's tests. Unlike the checker, the closure uses union-find.

use thiserror::Error;

use crate::checker::Query;
use crate::graph::{BuildOptions, GraphError, LamGraph, NodeId, NodeKind};
use crate::partition::{NodePartition, UnionFind};
use crate::term::{readback, term_eq, ReadbackError};

/// Smallest equivalence containing `rel` and closed under relating the
/// corresponding children of related applications and abstractions.
///
/// Works for any relation, not only queries over roots.
pub fn spread_query(g: &LamGraph, rel: &[(NodeId, NodeId)]) -> NodePartition {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    // Per union-find root: one application and one abstraction of the class.
    let mut app_rep: Vec<Option<NodeId>> = vec![None; n];
    let mut abs_rep: Vec<Option<NodeId>> = vec![None; n];
    for v in g.node_ids() {
        match g.kind(v) {
            NodeKind::App { .. } => app_rep[v.index()] = Some(v),
            NodeKind::Abs { .. } => abs_rep[v.index()] = Some(v),
            _ => {}
        }
    }
    let mut work: Vec<(NodeId, NodeId)> = rel.to_vec();
    while let Some((a, b)) = work.pop() {
        let Some((keep, drop)) = uf.union(a, b) else {
            continue;
        };
        let (k, d) = (keep.index(), drop.index());
        match (app_rep[k], app_rep[d]) {
            (Some(x), Some(y)) => {
                if let (
                    NodeKind::App { left: lx, right: rx },
                    NodeKind::App { left: ly, right: ry },
                ) = (g.kind(x), g.kind(y))
                {
                    work.push((lx, ly));
                    work.push((rx, ry));
                }
            }
            (None, Some(y)) => app_rep[k] = Some(y),
            _ => {}
        }
        match (abs_rep[k], abs_rep[d]) {
            (Some(x), Some(y)) => {
                if let (NodeKind::Abs { body: bx }, NodeKind::Abs { body: by }) =
                    (g.kind(x), g.kind(y))
                {
                    work.push((bx, by));
                }
            }
            (None, Some(y)) => abs_rep[k] = Some(y),
            _ => {}
        }
    }
    uf.into_partition()
}

fn child_pairs(a: NodeKind, b: NodeKind) -> Vec<(NodeId, NodeId)> {
    match (a, b) {
        (NodeKind::App { left: la, right: ra }, NodeKind::App { left: lb, right: rb }) => {
            vec![(la, lb), (ra, rb)]
        }
        (NodeKind::Abs { body: ba }, NodeKind::Abs { body: bb }) => vec![(ba, bb)],
        _ => Vec::new(),
    }
}

/// Homogeneous (every class has a single kind) and closed under relating
/// corresponding children.
pub fn is_blind_sharing_equivalence(g: &LamGraph, p: &NodePartition) -> bool {
    if p.len() != g.node_count() {
        return false;
    }
    g.node_ids().all(|v| {
        let r = p.representative(v);
        let (kv, kr) = (g.kind(v), g.kind(r));
        kv.label() == kr.label()
            && child_pairs(kv, kr)
                .into_iter()
                .all(|(x, y)| p.same_class(x, y))
    })
}

/// A blind sharing equivalence in which related bound variables have related
/// binders and no free variable is related to any other node.
pub fn is_sharing_equivalence(g: &LamGraph, p: &NodePartition) -> bool {
    is_blind_sharing_equivalence(g, p)
        && g.node_ids().all(|v| {
            let r = p.representative(v);
            match (g.kind(v), g.kind(r)) {
                (NodeKind::BoundVar { binder: bv }, NodeKind::BoundVar { binder: br }) => {
                    p.same_class(bv, br)
                }
                (NodeKind::FreeVar { .. }, _) => v == r,
                _ => true,
            }
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("NotAShEq: the partition is not a sharing equivalence")]
    NotAShEq,
    #[error("quotient is not a valid graph: {0}")]
    Invalid(#[from] GraphError),
}

/// The graph with one node per class of `p`, in order of least member, and
/// the map from original nodes to their class node.
pub fn quotient(g: &LamGraph, p: &NodePartition) -> Result<(LamGraph, Vec<NodeId>), QuotientError> {
    if !is_sharing_equivalence(g, p) {
        return Err(QuotientError::NotAShEq);
    }
    let mut image = vec![NodeId(u32::MAX); g.node_count()];
    let mut reps = Vec::new();
    for v in g.node_ids() {
        let r = p.representative(v);
        if r == v {
            image[v.index()] = NodeId::from_index(reps.len());
            reps.push(v);
        } else {
            image[v.index()] = image[r.index()];
        }
    }
    let nodes = reps
        .iter()
        .map(|&r| match g.kind(r) {
            NodeKind::App { left, right } => NodeKind::App {
                left: image[left.index()],
                right: image[right.index()],
            },
            NodeKind::Abs { body } => NodeKind::Abs {
                body: image[body.index()],
            },
            NodeKind::BoundVar { binder } => NodeKind::BoundVar {
                binder: image[binder.index()],
            },
            free @ NodeKind::FreeVar { .. } => free,
        })
        .collect();
    let q = LamGraph::from_nodes(nodes, g.atoms().clone(), BuildOptions::default())?;
    Ok((q, image))
}

/// Whether every queried pair reads back to the same term, unfolding at most
/// `limit` term nodes per root.
pub fn readback_equal(g: &LamGraph, q: &Query, limit: usize) -> Result<bool, ReadbackError> {
    for &(a, b) in q.pairs() {
        if a == b {
            readback(g, a, limit)?;
            continue;
        }
        let (ta, tb) = (readback(g, a, limit)?, readback(g, b, limit)?);
        if !term_eq(&ta, &tb) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, isomorphic, AtomId};

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    /// Two λ.0 graphs: nodes 0,1 and 2,3.
    fn two_identities() -> LamGraph {
        build_graph(
            vec![
                (n(0), NodeKind::Abs { body: n(1) }),
                (n(1), NodeKind::BoundVar { binder: n(0) }),
                (n(2), NodeKind::Abs { body: n(3) }),
                (n(3), NodeKind::BoundVar { binder: n(2) }),
            ],
            vec![],
        )
        .unwrap()
    }

    /// Left root A = App(B, C), B = App(λ1, λ1), C = App(λ2, λ2); right root
    /// D = App(E, E), E = App(λ3, λ4); each λi = Abs(vi).
    pub(crate) fn two_identity_roots() -> (LamGraph, NodeId, NodeId) {
        let mut spec = Vec::new();
        // Abstractions 0..4 at ids 0,2,4,6 with their variables at 1,3,5,7.
        for i in 0..4 {
            spec.push((n(2 * i), NodeKind::Abs { body: n(2 * i + 1) }));
            spec.push((n(2 * i + 1), NodeKind::BoundVar { binder: n(2 * i) }));
        }
        spec.push((n(8), NodeKind::App { left: n(0), right: n(0) })); // B
        spec.push((n(9), NodeKind::App { left: n(2), right: n(2) })); // C
        spec.push((n(10), NodeKind::App { left: n(8), right: n(9) })); // A
        spec.push((n(11), NodeKind::App { left: n(4), right: n(6) })); // E
        spec.push((n(12), NodeKind::App { left: n(11), right: n(11) })); // D
        (build_graph(spec, vec![]).unwrap(), n(10), n(12))
    }

    #[test]
    fn empty_and_reflexive_relations() {
        let g = two_identities();
        assert_eq!(spread_query(&g, &[]), NodePartition::identity(4));
        assert_eq!(spread_query(&g, &[(n(0), n(0))]), NodePartition::identity(4));
    }

    #[test]
    fn two_identity_roots_spread_to_chain() {
        let (g, a, d) = two_identity_roots();
        let p = spread_query(&g, &[(a, d)]);
        // Apps A D; apps B C E; all abstractions; all variables.
        assert_eq!(p.class_count(), 4);
        assert!(p.same_class(n(8), n(11)) && p.same_class(n(9), n(11)));
        assert!((1..4).all(|i| p.same_class(n(0), n(2 * i))));
        assert!(is_blind_sharing_equivalence(&g, &p));
        assert!(is_sharing_equivalence(&g, &p));
        let (q, image) = quotient(&g, &p).unwrap();
        let chain = build_graph(
            vec![
                (n(0), NodeKind::App { left: n(1), right: n(1) }),
                (n(1), NodeKind::App { left: n(2), right: n(2) }),
                (n(2), NodeKind::Abs { body: n(3) }),
                (n(3), NodeKind::BoundVar { binder: n(2) }),
            ],
            vec![],
        )
        .unwrap();
        assert!(isomorphic(&q, &chain));
        assert_eq!(q.roots(), &[image[a.index()]]);
        assert!(readback_equal(&g, &Query::single(a, d), 1000).unwrap());
    }

    #[test]
    fn non_homogeneous_spread() {
        // Roots App(x, x) and Abs(x).
        let g = build_graph(
            vec![
                (n(0), NodeKind::FreeVar { atom: AtomId(0) }),
                (n(1), NodeKind::App { left: n(0), right: n(0) }),
                (n(2), NodeKind::Abs { body: n(0) }),
            ],
            vec!["x".into()],
        )
        .unwrap();
        let p = spread_query(&g, &[(n(1), n(2))]);
        assert!(!is_blind_sharing_equivalence(&g, &p));
        assert_eq!(quotient(&g, &p), Err(QuotientError::NotAShEq));
    }

    #[test]
    fn variable_pair_alone_is_not_a_sharing_equivalence() {
        let g = two_identities();
        let vars_only = spread_query(&g, &[(n(1), n(3))]);
        assert!(is_blind_sharing_equivalence(&g, &vars_only));
        assert!(!is_sharing_equivalence(&g, &vars_only));
        let both = spread_query(&g, &[(n(1), n(3)), (n(0), n(2))]);
        assert_eq!(both, spread_query(&g, &[(n(0), n(2))]));
        assert!(is_sharing_equivalence(&g, &both));
        assert!(vars_only.is_refined_by(&both));
    }

    #[test]
    fn distinct_free_variables_are_never_equated() {
        let g = build_graph(
            vec![
                (n(0), NodeKind::FreeVar { atom: AtomId(0) }),
                (n(1), NodeKind::FreeVar { atom: AtomId(1) }),
            ],
            vec!["x".into(), "y".into()],
        )
        .unwrap();
        let p = NodePartition::from_labels(&[0, 0]);
        assert!(is_blind_sharing_equivalence(&g, &p));
        assert!(!is_sharing_equivalence(&g, &p));
        assert!(!readback_equal(&g, &Query::single(n(0), n(1)), 10).unwrap());
    }

    #[test]
    fn identity_quotient_is_isomorphic() {
        let (g, _, _) = two_identity_roots();
        let (q, image) = quotient(&g, &NodePartition::identity(g.node_count())).unwrap();
        assert!(isomorphic(&g, &q));
        assert!(image.iter().enumerate().all(|(i, m)| m.index() == i));
    }

    #[test]
    fn readback_limits_propagate() {
        let (g, a, d) = two_identity_roots();
        assert!(matches!(
            readback_equal(&g, &Query::single(a, d), 3),
            Err(ReadbackError::LimitExceeded { .. })
        ));
    }
}
