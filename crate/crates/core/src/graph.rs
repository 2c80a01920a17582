//! λ-graphs: an arena of application, abstraction and variable nodes with
//! structural edges, binding edges and precomputed parent lists.
//!
//! A [`LamGraph`] is immutable once built. [`build_graph`] checks references,
//! computes parents and roots in one pass, and validates that the graph is
//! acyclic (binding edges ignored) and dominated (every bound variable is only
//! reachable from a root through its binder).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Handle of a node in a [`LamGraph`] arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Interned free-variable name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interning table of free-variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    lookup: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = Self::new();
        for name in names {
            table.intern(name);
        }
        table
    }

    pub fn intern(&mut self, name: impl Into<String>) -> AtomId {
        let name = name.into();
        if let Some(&id) = self.lookup.get(&name) {
            return id;
        }
        let id = AtomId(self.names.len() as u32);
        self.lookup.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    pub fn get(&self, name: &str) -> Option<AtomId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, atom: AtomId) -> &str {
        &self.names[atom.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// The label of a node together with its outgoing edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    App { left: NodeId, right: NodeId },
    Abs { body: NodeId },
    /// Bound variable; `binder` is the binding edge, never a structural edge.
    BoundVar { binder: NodeId },
    FreeVar { atom: AtomId },
}

/// Homogeneity classes: two nodes may only be equated if they share a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    App,
    Abs,
    BoundVar,
    FreeVar,
}

impl NodeKind {
    pub fn label(&self) -> Label {
        match self {
            NodeKind::App { .. } => Label::App,
            NodeKind::Abs { .. } => Label::Abs,
            NodeKind::BoundVar { .. } => Label::BoundVar,
            NodeKind::FreeVar { .. } => Label::FreeVar,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, NodeKind::BoundVar { .. } | NodeKind::FreeVar { .. })
    }

    pub fn binder(&self) -> Option<NodeId> {
        match *self {
            NodeKind::BoundVar { binder } => Some(binder),
            _ => None,
        }
    }

    /// Structural children paired with the direction that reaches them.
    pub fn children(&self) -> Children {
        match *self {
            NodeKind::App { left, right } => Children {
                items: [(left, Direction::Left), (right, Direction::Right)],
                len: 2,
                pos: 0,
            },
            NodeKind::Abs { body } => Children {
                items: [(body, Direction::Down), (body, Direction::Down)],
                len: 1,
                pos: 0,
            },
            _ => Children {
                items: [(NodeId(0), Direction::Down); 2],
                len: 0,
                pos: 0,
            },
        }
    }

    pub fn child(&self, dir: Direction) -> Option<NodeId> {
        match (*self, dir) {
            (NodeKind::App { left, .. }, Direction::Left) => Some(left),
            (NodeKind::App { right, .. }, Direction::Right) => Some(right),
            (NodeKind::Abs { body }, Direction::Down) => Some(body),
            _ => None,
        }
    }
}

/// Iterator over the structural children of a node.
#[derive(Clone, Debug)]
pub struct Children {
    items: [(NodeId, Direction); 2],
    len: u8,
    pos: u8,
}

impl Iterator for Children {
    type Item = (NodeId, Direction);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos < self.len {
            self.pos += 1;
            Some(self.items[self.pos as usize - 1])
        } else {
            None
        }
    }
}

/// A step along a structural edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Left,
    Down,
    Right,
}

/// A sequence of directions, first step first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trace(pub Vec<Direction>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Direction] {
        &self.0
    }
}

impl From<Vec<Direction>> for Trace {
    fn from(steps: Vec<Direction>) -> Self {
        Trace(steps)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("DuplicateNodeId: node id {0} defined twice")]
    DuplicateNodeId(u32),
    #[error("MissingNodeId: node ids are not dense, {0} is missing")]
    MissingNodeId(u32),
    #[error("DanglingReference: node {node} refers to missing node {target}")]
    DanglingReference { node: NodeId, target: u32 },
    #[error("DanglingAtom: node {node} refers to missing atom {atom}")]
    DanglingAtom { node: NodeId, atom: u32 },
    #[error("BinderNotAbs: bound variable {var} has binder {binder}, which is not an abstraction")]
    BinderNotAbs { var: NodeId, binder: NodeId },
    #[error("DuplicateFreeVar: nodes {first} and {second} both denote free variable `{name}`")]
    DuplicateFreeVar {
        name: String,
        first: NodeId,
        second: NodeId,
    },
    #[error("CyclicGraph: node {witness} lies on a structural cycle")]
    CyclicGraph { witness: NodeId },
    #[error(
        "DominationViolation: bound variable {var} is reachable from root {root} without crossing its binder {binder}"
    )]
    DominationViolation {
        var: NodeId,
        binder: NodeId,
        root: NodeId,
    },
    #[error("RootsMismatch: declared roots {declared:?} differ from structural roots {actual:?}")]
    RootsMismatch {
        declared: Vec<NodeId>,
        actual: Vec<NodeId>,
    },
}

impl GraphError {
    /// The error variant's name, as reported by the command-line tool.
    pub fn kind_name(&self) -> &'static str {
        match self {
            GraphError::DuplicateNodeId(_) => "DuplicateNodeId",
            GraphError::MissingNodeId(_) => "MissingNodeId",
            GraphError::DanglingReference { .. } => "DanglingReference",
            GraphError::DanglingAtom { .. } => "DanglingAtom",
            GraphError::BinderNotAbs { .. } => "BinderNotAbs",
            GraphError::DuplicateFreeVar { .. } => "DuplicateFreeVar",
            GraphError::CyclicGraph { .. } => "CyclicGraph",
            GraphError::DominationViolation { .. } => "DominationViolation",
            GraphError::RootsMismatch { .. } => "RootsMismatch",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("NoSuchPath: cannot step {direction:?} from node {at} (step {step})")]
    NoSuchPath {
        at: NodeId,
        step: usize,
        direction: Direction,
    },
    #[error("NotCrossed: the path does not cross node {0}")]
    NotCrossed(NodeId),
}

/// Which structural properties [`build_graph_with`] should verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub check_acyclic: bool,
    pub check_dominated: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            check_acyclic: true,
            check_dominated: true,
        }
    }
}

impl BuildOptions {
    /// Reference checks only. Meant for inputs known to be valid, such as
    /// benchmark families.
    pub fn unchecked() -> Self {
        BuildOptions {
            check_acyclic: false,
            check_dominated: false,
        }
    }
}

/// A finite, acyclic, dominated graph of λ-nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LamGraph {
    nodes: Vec<NodeKind>,
    // Parent lists in compressed row form: the parents of node `n` are
    // `parent_data[parent_start[n]..parent_start[n + 1]]`.
    parent_start: Vec<u32>,
    parent_data: Vec<(NodeId, Direction)>,
    roots: Vec<NodeId>,
    atoms: AtomTable,
}

/// Builds and fully validates a graph from `(id, kind)` pairs in any order.
///
/// Ids must be exactly `0..spec.len()`. Free variables refer to `atoms` by
/// index and each atom may label at most one node.
pub fn build_graph(
    spec: Vec<(NodeId, NodeKind)>,
    atoms: Vec<String>,
) -> Result<LamGraph, GraphError> {
    build_graph_with(spec, AtomTable::from_names(atoms), BuildOptions::default())
}

pub fn build_graph_with(
    spec: Vec<(NodeId, NodeKind)>,
    atoms: AtomTable,
    options: BuildOptions,
) -> Result<LamGraph, GraphError> {
    let count = spec.len();
    let mut slots: Vec<Option<NodeKind>> = vec![None; count];
    for (id, kind) in spec {
        if id.index() >= count {
            return Err(GraphError::MissingNodeId(
                (0..count as u32)
                    .find(|&i| slots[i as usize].is_none())
                    .unwrap_or(0),
            ));
        }
        if slots[id.index()].replace(kind).is_some() {
            return Err(GraphError::DuplicateNodeId(id.0));
        }
    }
    let nodes = slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| slot.ok_or(GraphError::MissingNodeId(i as u32)))
        .collect::<Result<Vec<_>, _>>()?;
    LamGraph::from_nodes(nodes, atoms, options)
}

impl LamGraph {
    /// Builds a graph whose node `i` is `nodes[i]`.
    pub fn from_nodes(
        nodes: Vec<NodeKind>,
        atoms: AtomTable,
        options: BuildOptions,
    ) -> Result<LamGraph, GraphError> {
        check_references(&nodes, &atoms)?;
        let (parent_start, parent_data) = compute_parents(&nodes);
        let roots = (0..nodes.len())
            .filter(|&i| parent_start[i] == parent_start[i + 1])
            .map(NodeId::from_index)
            .collect();
        let graph = LamGraph {
            nodes,
            parent_start,
            parent_data,
            roots,
            atoms,
        };
        if options.check_acyclic {
            graph.validate_acyclic()?;
        }
        if options.check_dominated {
            graph.validate_dominated()?;
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of structural edges (binding edges excluded).
    pub fn edge_count(&self) -> usize {
        self.parent_data.len()
    }

    pub fn kind(&self, n: NodeId) -> NodeKind {
        self.nodes[n.index()]
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::from_index)
    }

    /// Parents of `n`, each with the direction leading from the parent to `n`.
    #[inline]
    pub fn parents(&self, n: NodeId) -> &[(NodeId, Direction)] {
        let i = n.index();
        &self.parent_data[self.parent_start[i] as usize..self.parent_start[i + 1] as usize]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn is_root(&self, n: NodeId) -> bool {
        n.index() < self.nodes.len() && self.parents(n).is_empty()
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    /// Checks that structural edges (binding edges excluded) form a DAG.
    pub fn validate_acyclic(&self) -> Result<(), GraphError> {
        // Kahn's algorithm from the roots downwards.
        let n = self.nodes.len();
        let mut pending: Vec<u32> = (0..n)
            .map(|i| self.parent_start[i + 1] - self.parent_start[i])
            .collect();
        let mut stack: Vec<NodeId> = self.roots.clone();
        let mut done = 0usize;
        while let Some(node) = stack.pop() {
            done += 1;
            for (child, _) in self.kind(node).children() {
                pending[child.index()] -= 1;
                if pending[child.index()] == 0 {
                    stack.push(child);
                }
            }
        }
        if done == n {
            return Ok(());
        }
        // Every unprocessed node still has an unprocessed parent; walking up
        // through them must eventually revisit a node.
        let start = (0..n).find(|&i| pending[i] > 0).expect("unprocessed node");
        let mut seen = vec![false; n];
        let mut cur = NodeId::from_index(start);
        loop {
            if seen[cur.index()] {
                return Err(GraphError::CyclicGraph { witness: cur });
            }
            seen[cur.index()] = true;
            cur = self
                .parents(cur)
                .iter()
                .map(|&(p, _)| p)
                .find(|p| pending[p.index()] > 0)
                .expect("unprocessed node without unprocessed parent");
        }
    }

    /// Checks that every bound variable is dominated by its binder.
    ///
    /// For each binder, sweeps from all roots without entering the binder; a
    /// bound variable of that binder reached by the sweep is a violation.
    pub fn validate_dominated(&self) -> Result<(), GraphError> {
        let n = self.nodes.len();
        let mut vars_of: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for (i, kind) in self.nodes.iter().enumerate() {
            if let NodeKind::BoundVar { binder } = *kind {
                vars_of.entry(binder).or_default().push(NodeId::from_index(i));
            }
        }
        let mut binders: Vec<_> = vars_of.into_iter().collect();
        binders.sort();

        const UNSEEN: u32 = u32::MAX;
        let mut origin = vec![UNSEEN; n];
        let mut stamp = vec![u32::MAX; n];
        let mut stack = Vec::new();
        for (round, (binder, vars)) in binders.iter().enumerate() {
            let round = round as u32;
            for &root in &self.roots {
                if root == *binder || stamp[root.index()] == round {
                    continue;
                }
                stamp[root.index()] = round;
                origin[root.index()] = root.0;
                stack.push(root);
            }
            while let Some(node) = stack.pop() {
                for (child, _) in self.kind(node).children() {
                    if child == *binder || stamp[child.index()] == round {
                        continue;
                    }
                    stamp[child.index()] = round;
                    origin[child.index()] = origin[node.index()];
                    stack.push(child);
                }
            }
            if let Some(&var) = vars.iter().find(|v| stamp[v.index()] == round) {
                return Err(GraphError::DominationViolation {
                    var,
                    binder: *binder,
                    root: NodeId(origin[var.index()]),
                });
            }
        }
        Ok(())
    }

    /// Follows `trace` from `start`.
    pub fn follow(&self, start: NodeId, trace: &Trace) -> Result<NodeId, PathError> {
        let mut cur = start;
        for (step, &direction) in trace.steps().iter().enumerate() {
            cur = self
                .kind(cur)
                .child(direction)
                .ok_or(PathError::NoSuchPath {
                    at: cur,
                    step,
                    direction,
                })?;
        }
        Ok(cur)
    }

    /// De Bruijn index of abstraction `binder` relative to the access path
    /// `trace` from `start`: the number of abstractions other than `binder`
    /// crossed after the last crossing of `binder` (the endpoint included).
    pub fn index_of(&self, start: NodeId, trace: &Trace, binder: NodeId) -> Result<u32, PathError> {
        let mut visited = Vec::with_capacity(trace.len() + 1);
        visited.push(start);
        let mut cur = start;
        for (step, &direction) in trace.steps().iter().enumerate() {
            cur = self
                .kind(cur)
                .child(direction)
                .ok_or(PathError::NoSuchPath {
                    at: cur,
                    step,
                    direction,
                })?;
            visited.push(cur);
        }
        let last = visited
            .iter()
            .rposition(|&n| n == binder)
            .ok_or(PathError::NotCrossed(binder))?;
        Ok(visited[last + 1..]
            .iter()
            .filter(|&&n| n != binder && matches!(self.kind(n), NodeKind::Abs { .. }))
            .count() as u32)
    }

    /// All nodes reachable from `roots` along structural edges.
    pub fn reachable_from(&self, roots: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = Vec::new();
        for &r in roots {
            if !seen[r.index()] {
                seen[r.index()] = true;
                stack.push(r);
            }
        }
        while let Some(node) = stack.pop() {
            for (child, _) in self.kind(node).children() {
                if !seen[child.index()] {
                    seen[child.index()] = true;
                    stack.push(child);
                }
            }
        }
        seen
    }

    /// Checks an externally declared root set against the structural one.
    pub fn check_declared_roots(&self, declared: &[NodeId]) -> Result<(), GraphError> {
        let mut sorted = declared.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted != self.roots {
            return Err(GraphError::RootsMismatch {
                declared: sorted,
                actual: self.roots.clone(),
            });
        }
        Ok(())
    }
}

fn check_references(nodes: &[NodeKind], atoms: &AtomTable) -> Result<(), GraphError> {
    let count = nodes.len();
    let mut free_node: Vec<Option<NodeId>> = vec![None; atoms.len()];
    for (i, kind) in nodes.iter().enumerate() {
        let node = NodeId::from_index(i);
        let in_range = |target: NodeId| {
            if target.index() < count {
                Ok(())
            } else {
                Err(GraphError::DanglingReference {
                    node,
                    target: target.0,
                })
            }
        };
        match *kind {
            NodeKind::App { left, right } => {
                in_range(left)?;
                in_range(right)?;
            }
            NodeKind::Abs { body } => in_range(body)?,
            NodeKind::BoundVar { binder } => {
                in_range(binder)?;
                if !matches!(nodes[binder.index()], NodeKind::Abs { .. }) {
                    return Err(GraphError::BinderNotAbs { var: node, binder });
                }
            }
            NodeKind::FreeVar { atom } => {
                let slot = free_node
                    .get_mut(atom.index())
                    .ok_or(GraphError::DanglingAtom { node, atom: atom.0 })?;
                if let Some(first) = *slot {
                    return Err(GraphError::DuplicateFreeVar {
                        name: atoms.name(atom).to_string(),
                        first,
                        second: node,
                    });
                }
                *slot = Some(node);
            }
        }
    }
    Ok(())
}

fn compute_parents(nodes: &[NodeKind]) -> (Vec<u32>, Vec<(NodeId, Direction)>) {
    let n = nodes.len();
    let mut start = vec![0u32; n + 1];
    for kind in nodes {
        for (child, _) in kind.children() {
            start[child.index() + 1] += 1;
        }
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut data = vec![(NodeId(0), Direction::Down); start[n] as usize];
    for (i, kind) in nodes.iter().enumerate() {
        for (child, dir) in kind.children() {
            let slot = &mut fill[child.index()];
            data[*slot as usize] = (NodeId::from_index(i), dir);
            *slot += 1;
        }
    }
    (start, data)
}

/// Incremental construction of a graph, used by the compilers and generators.
///
/// Free variables are merged: every name maps to a single node.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Option<NodeKind>>,
    atoms: AtomTable,
    free_nodes: HashMap<AtomId, NodeId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn atoms_mut(&mut self) -> &mut AtomTable {
        &mut self.atoms
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId::from_index(self.nodes.len());
        self.nodes.push(Some(kind));
        id
    }

    /// Allocates a node to be defined later, e.g. an abstraction whose body
    /// refers back to it.
    pub fn reserve(&mut self) -> NodeId {
        let id = NodeId::from_index(self.nodes.len());
        self.nodes.push(None);
        id
    }

    pub fn define(&mut self, id: NodeId, kind: NodeKind) {
        let slot = &mut self.nodes[id.index()];
        debug_assert!(slot.is_none(), "node {id} defined twice");
        *slot = Some(kind);
    }

    pub fn app(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.push(NodeKind::App { left, right })
    }

    pub fn abs(&mut self, body: NodeId) -> NodeId {
        self.push(NodeKind::Abs { body })
    }

    pub fn bound_var(&mut self, binder: NodeId) -> NodeId {
        self.push(NodeKind::BoundVar { binder })
    }

    pub fn free_var(&mut self, name: &str) -> NodeId {
        let atom = self.atoms.intern(name);
        self.free_atom(atom)
    }

    pub fn free_atom(&mut self, atom: AtomId) -> NodeId {
        if let Some(&node) = self.free_nodes.get(&atom) {
            return node;
        }
        let node = self.push(NodeKind::FreeVar { atom });
        self.free_nodes.insert(atom, node);
        node
    }

    /// Builds the graph containing every node added so far.
    pub fn build(self, options: BuildOptions) -> Result<LamGraph, GraphError> {
        let nodes = self
            .nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.ok_or(GraphError::MissingNodeId(i as u32)))
            .collect::<Result<Vec<_>, _>>()?;
        LamGraph::from_nodes(nodes, self.atoms, options)
    }

    /// Builds the graph restricted to the nodes reachable from `roots`,
    /// renumbered in ascending order. Returns the graph and the new ids of
    /// `roots`.
    pub fn build_reachable(
        self,
        roots: &[NodeId],
        options: BuildOptions,
    ) -> Result<(LamGraph, Vec<NodeId>), GraphError> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        for r in roots {
            seen[r.index()] = true;
        }
        while let Some(node) = stack.pop() {
            let kind = self.nodes[node.index()].ok_or(GraphError::MissingNodeId(node.0))?;
            for (child, _) in kind.children() {
                if child.index() >= seen.len() {
                    return Err(GraphError::DanglingReference {
                        node,
                        target: child.0,
                    });
                }
                if !seen[child.index()] {
                    seen[child.index()] = true;
                    stack.push(child);
                }
            }
        }
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut next = 0u32;
        for (i, &keep) in seen.iter().enumerate() {
            if keep {
                remap[i] = next;
                next += 1;
            }
        }
        let map = |n: NodeId| NodeId(remap[n.index()]);
        let mut nodes = Vec::with_capacity(next as usize);
        for (i, slot) in self.nodes.iter().enumerate() {
            if !seen[i] {
                continue;
            }
            let kind = slot.expect("reachable nodes are defined");
            nodes.push(match kind {
                NodeKind::App { left, right } => NodeKind::App {
                    left: map(left),
                    right: map(right),
                },
                NodeKind::Abs { body } => NodeKind::Abs { body: map(body) },
                NodeKind::BoundVar { binder } => {
                    if !seen[binder.index()] {
                        // The binder is not an ancestor of its variable.
                        return Err(GraphError::DominationViolation {
                            var: NodeId::from_index(i),
                            binder,
                            root: roots.first().copied().unwrap_or(NodeId(0)),
                        });
                    }
                    NodeKind::BoundVar {
                        binder: map(binder),
                    }
                }
                free @ NodeKind::FreeVar { .. } => free,
            });
        }
        let graph = LamGraph::from_nodes(nodes, self.atoms, options)?;
        Ok((graph, roots.iter().map(|&r| map(r)).collect()))
    }
}

/// A serialization of `g` that is invariant under renumbering of nodes.
///
/// Roots are ordered by the shape of the subgraph below them, then nodes are
/// numbered in depth-first discovery order. Roots of identical shape are tried
/// in every order (up to a bound) and the least serialization is kept.
pub fn canonical_form(g: &LamGraph) -> Vec<u64> {
    let mut keyed: Vec<(Vec<u64>, NodeId)> = g
        .roots()
        .iter()
        .map(|&r| (serialize_from(g, &[r]), r))
        .collect();
    keyed.sort();
    let mut groups: Vec<Vec<NodeId>> = Vec::new();
    for (i, (key, root)) in keyed.iter().enumerate() {
        if i > 0 && keyed[i - 1].0 == *key {
            groups.last_mut().unwrap().push(*root);
        } else {
            groups.push(vec![*root]);
        }
    }
    let permutations: usize = groups
        .iter()
        .map(|grp| (1..=grp.len()).product::<usize>())
        .try_fold(1usize, |acc, k| acc.checked_mul(k))
        .unwrap_or(usize::MAX);
    if permutations == 1 || permutations > 5040 {
        let order: Vec<NodeId> = groups.concat();
        return serialize_from(g, &order);
    }
    let mut best: Option<Vec<u64>> = None;
    let mut order = Vec::new();
    permute_groups(g, &groups, 0, &mut order, &mut best);
    best.unwrap()
}

fn permute_groups(
    g: &LamGraph,
    groups: &[Vec<NodeId>],
    depth: usize,
    order: &mut Vec<NodeId>,
    best: &mut Option<Vec<u64>>,
) {
    if depth == groups.len() {
        let s = serialize_from(g, order);
        if best.as_ref().is_none_or(|b| s < *b) {
            *best = Some(s);
        }
        return;
    }
    let mut group = groups[depth].clone();
    let len = group.len();
    heap_permutations(&mut group, len, &mut |perm| {
        let mark = order.len();
        order.extend_from_slice(perm);
        permute_groups(g, groups, depth + 1, order, best);
        order.truncate(mark);
    });
}

fn heap_permutations(items: &mut Vec<NodeId>, k: usize, visit: &mut dyn FnMut(&[NodeId])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

fn serialize_from(g: &LamGraph, roots: &[NodeId]) -> Vec<u64> {
    const UNSET: u32 = u32::MAX;
    let mut number = vec![UNSET; g.node_count()];
    let mut order = Vec::new();
    for &root in roots {
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if number[node.index()] != UNSET {
                continue;
            }
            number[node.index()] = order.len() as u32;
            order.push(node);
            let kind = g.kind(node);
            let children: Vec<_> = kind.children().map(|(c, _)| c).collect();
            for &c in children.iter().rev() {
                stack.push(c);
            }
        }
    }
    let num = |n: NodeId| number[n.index()] as u64;
    let mut out = Vec::with_capacity(order.len() * 3);
    for node in order {
        match g.kind(node) {
            NodeKind::App { left, right } => out.extend([0, num(left), num(right)]),
            NodeKind::Abs { body } => out.extend([1, num(body)]),
            NodeKind::BoundVar { binder } => out.extend([2, num(binder)]),
            NodeKind::FreeVar { atom } => {
                out.push(3);
                // Atoms compare by name so that independent tables agree.
                out.extend(g.atoms().name(atom).bytes().map(u64::from));
                out.push(u64::MAX);
            }
        }
    }
    out
}

/// Whether two graphs are equal up to renumbering of nodes.
pub fn isomorphic(a: &LamGraph, b: &LamGraph) -> bool {
    a.node_count() == b.node_count() && canonical_form(a) == canonical_form(b)
}
