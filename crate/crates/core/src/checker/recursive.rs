//! Blind check without queues: every node is assigned by a recursive call that
//! marks the node as visiting while its parents and siblings are handled.
//!
//! Unlike the queue backend, homogeneity is checked when a node is assigned,
//! and the query edges between its children and its canonic's children are
//! created right after its parents are done (including loops when the node is
//! its own canonic). The recursion runs on an explicit stack.

use super::{CanonicAssignment, CheckStats, Failure, FailureReason, Query, QueryEdges, NIL};
use crate::graph::{LamGraph, NodeId, NodeKind};

#[derive(Clone, Copy)]
enum Phase {
    Parents(u32),
    Siblings(u32),
}

struct Frame {
    node: NodeId,
    canon: NodeId,
    phase: Phase,
}

struct State<'g> {
    g: &'g LamGraph,
    canonic: Vec<u32>,
    visiting: Vec<bool>,
    edges: QueryEdges,
    frames: Vec<Frame>,
    stats: &'g mut CheckStats,
}

pub(super) fn run(
    g: &LamGraph,
    q: &Query,
    stats: &mut CheckStats,
) -> Result<CanonicAssignment, Failure> {
    let n = g.node_count();
    let mut st = State {
        g,
        canonic: vec![NIL; n],
        visiting: vec![false; n],
        edges: QueryEdges::new(n, 2 * q.len() + 4 * n),
        frames: Vec::new(),
        stats,
    };
    for &(a, b) in q.pairs() {
        st.stats.transitions += 1;
        st.edges.add(a, b);
    }
    st.note_edges();
    for i in 0..n {
        st.stats.transitions += 1;
        if st.canonic[i] == NIL {
            let v = NodeId::from_index(i);
            st.enter(v, v)?;
            st.drive()?;
        }
    }
    Ok(CanonicAssignment {
        canonic: st.canonic.into_iter().map(NodeId).collect(),
    })
}

impl State<'_> {
    fn note_edges(&mut self) {
        self.stats.max_query_edges = self.stats.max_query_edges.max(self.edges.len());
    }

    fn enter(&mut self, n: NodeId, c: NodeId) -> Result<(), Failure> {
        self.stats.transitions += 1;
        if self.g.kind(n).label() != self.g.kind(c).label() {
            return Err(Failure {
                reason: FailureReason::NotHomogeneous,
                node: n,
                other: c,
            });
        }
        self.stats.transitions += 2;
        self.visiting[n.index()] = true;
        if self.canonic[n.index()] != NIL {
            self.stats.canonic_rewrites += 1;
        }
        self.canonic[n.index()] = c.0;
        self.frames.push(Frame {
            node: n,
            canon: c,
            phase: Phase::Parents(0),
        });
        Ok(())
    }

    fn link_children(&mut self, n: NodeId, c: NodeId) {
        self.stats.transitions += 1;
        match (self.g.kind(n), self.g.kind(c)) {
            (NodeKind::Abs { body: bn }, NodeKind::Abs { body: bc }) => self.edges.add(bn, bc),
            (
                NodeKind::App { left: ln, right: rn },
                NodeKind::App { left: lc, right: rc },
            ) => {
                self.edges.add(ln, lc);
                self.edges.add(rn, rc);
            }
            _ => {}
        }
        self.note_edges();
    }

    fn drive(&mut self) -> Result<(), Failure> {
        while let Some(frame) = self.frames.last_mut() {
            let (node, canon) = (frame.node, frame.canon);
            match frame.phase {
                Phase::Parents(next) => {
                    let parents = self.g.parents(node);
                    let Some(&(m, _)) = parents.get(next as usize) else {
                        frame.phase = Phase::Siblings(NIL);
                        self.link_children(node, canon);
                        continue;
                    };
                    self.stats.transitions += 1;
                    frame.phase = Phase::Parents(next + 1);
                    if self.visiting[m.index()] {
                        return Err(Failure {
                            reason: FailureReason::ParentStillBuilding,
                            node,
                            other: m,
                        });
                    }
                    if self.canonic[m.index()] == NIL {
                        self.enter(m, m)?;
                    }
                }
                Phase::Siblings(prev) => {
                    let entry = self.edges.after(node, prev);
                    if entry == NIL {
                        self.stats.transitions += 1;
                        self.visiting[node.index()] = false;
                        self.frames.pop();
                        continue;
                    }
                    self.stats.transitions += 1;
                    frame.phase = Phase::Siblings(entry);
                    let m = self.edges.target(entry);
                    match self.canonic[m.index()] {
                        NIL => self.enter(m, canon)?,
                        c if c != canon.0 => {
                            return Err(Failure {
                                reason: FailureReason::SiblingInOtherClass,
                                node,
                                other: m,
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }
}
