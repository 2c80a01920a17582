//! Blind check with one FIFO queue per class under construction.
//!
//! Class construction recurses into unassigned parents; the recursion is kept
//! on an explicit stack of frames so deep graphs cannot overflow the call
//! stack. Queues are intrusive lists threaded through `queue_next`.

use super::{CanonicAssignment, CheckStats, Failure, FailureReason, Query, QueryEdges, NIL};
use crate::graph::{LamGraph, NodeId, NodeKind};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Building {
    Undefined,
    Yes,
    No,
}

#[derive(Clone, Copy)]
enum Phase {
    Pop,
    Parents { node: NodeId, next: u32 },
    Siblings { node: NodeId, prev: u32 },
}

struct Frame {
    canon: NodeId,
    head: u32,
    tail: u32,
    phase: Phase,
}

struct State<'g> {
    g: &'g LamGraph,
    canonic: Vec<u32>,
    building: Vec<Building>,
    queue_next: Vec<u32>,
    pushed: Vec<bool>,
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
        building: vec![Building::Undefined; n],
        queue_next: vec![NIL; n],
        pushed: vec![false; n],
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
            st.build_class(NodeId::from_index(i));
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

    fn set_canonic(&mut self, n: NodeId, c: NodeId) {
        if self.canonic[n.index()] != NIL {
            self.stats.canonic_rewrites += 1;
        }
        self.canonic[n.index()] = c.0;
    }

    fn note_push(&mut self, n: NodeId) {
        if std::mem::replace(&mut self.pushed[n.index()], true) {
            self.stats.repeated_enqueues += 1;
        }
    }

    fn build_class(&mut self, c: NodeId) {
        self.stats.transitions += 3;
        self.set_canonic(c, c);
        self.building[c.index()] = Building::Yes;
        self.queue_next[c.index()] = NIL;
        self.note_push(c);
        self.frames.push(Frame {
            canon: c,
            head: c.0,
            tail: c.0,
            phase: Phase::Pop,
        });
    }

    fn enqueue(&mut self, m: NodeId, c: NodeId) -> Result<(), Failure> {
        self.stats.transitions += 1;
        match (self.g.kind(m), self.g.kind(c)) {
            (NodeKind::Abs { body: bm }, NodeKind::Abs { body: bc }) => self.edges.add(bm, bc),
            (
                NodeKind::App { left: lm, right: rm },
                NodeKind::App { left: lc, right: rc },
            ) => {
                self.edges.add(lm, lc);
                self.edges.add(rm, rc);
            }
            (NodeKind::BoundVar { .. }, NodeKind::BoundVar { .. })
            | (NodeKind::FreeVar { .. }, NodeKind::FreeVar { .. }) => {}
            _ => {
                return Err(Failure {
                    reason: FailureReason::NotHomogeneous,
                    node: m,
                    other: c,
                })
            }
        }
        self.note_edges();
        self.stats.transitions += 2;
        self.set_canonic(m, c);
        self.note_push(m);
        self.queue_next[m.index()] = NIL;
        let frame = self.frames.last_mut().expect("enqueue outside a class");
        if frame.head == NIL {
            frame.head = m.0;
        } else {
            self.queue_next[frame.tail as usize] = m.0;
        }
        frame.tail = m.0;
        Ok(())
    }

    /// Runs frames until the stack is empty.
    fn drive(&mut self) -> Result<(), Failure> {
        while let Some(frame) = self.frames.last_mut() {
            let canon = frame.canon;
            match frame.phase {
                Phase::Pop => {
                    self.stats.transitions += 1;
                    if frame.head == NIL {
                        self.stats.transitions += 1;
                        self.building[canon.index()] = Building::No;
                        self.frames.pop();
                        continue;
                    }
                    self.stats.transitions += 1;
                    let node = NodeId(frame.head);
                    frame.head = self.queue_next[node.index()];
                    frame.phase = Phase::Parents { node, next: 0 };
                }
                Phase::Parents { node, next } => {
                    let parents = self.g.parents(node);
                    let Some(&(m, _)) = parents.get(next as usize) else {
                        frame.phase = Phase::Siblings { node, prev: NIL };
                        continue;
                    };
                    self.stats.transitions += 1;
                    frame.phase = Phase::Parents { node, next: next + 1 };
                    match self.canonic[m.index()] {
                        NIL => self.build_class(m),
                        c if self.building[c as usize] == Building::Yes => {
                            return Err(Failure {
                                reason: FailureReason::ParentStillBuilding,
                                node,
                                other: m,
                            })
                        }
                        _ => {}
                    }
                }
                Phase::Siblings { node, prev } => {
                    let entry = self.edges.after(node, prev);
                    if entry == NIL {
                        frame.phase = Phase::Pop;
                        continue;
                    }
                    self.stats.transitions += 1;
                    frame.phase = Phase::Siblings { node, prev: entry };
                    let m = self.edges.target(entry);
                    match self.canonic[m.index()] {
                        NIL => self.enqueue(m, canon)?,
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
