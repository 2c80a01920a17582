//! Equivalence relations over the nodes of a graph.

use std::collections::HashMap;

use crate::graph::NodeId;

/// An equivalence relation on `0..len`, stored as the least member of each
/// node's class. Two partitions are equal exactly when they relate the same
/// pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodePartition {
    least: Vec<NodeId>,
}

impl NodePartition {
    pub fn identity(len: usize) -> Self {
        NodePartition {
            least: (0..len).map(NodeId::from_index).collect(),
        }
    }

    /// From any representative map: nodes with the same representative share
    /// a class.
    pub fn from_representatives(reps: &[NodeId]) -> Self {
        let mut first: HashMap<NodeId, NodeId> = HashMap::with_capacity(reps.len());
        let least = reps
            .iter()
            .enumerate()
            .map(|(i, &rep)| *first.entry(rep).or_insert(NodeId::from_index(i)))
            .collect();
        NodePartition { least }
    }

    /// From a class label per node (e.g. a restricted-growth string).
    pub fn from_labels(labels: &[usize]) -> Self {
        let reps: Vec<NodeId> = labels.iter().map(|&l| NodeId::from_index(l)).collect();
        Self::from_representatives(&reps)
    }

    pub fn len(&self) -> usize {
        self.least.len()
    }

    pub fn is_empty(&self) -> bool {
        self.least.is_empty()
    }

    /// The least member of `n`'s class.
    #[inline]
    pub fn representative(&self, n: NodeId) -> NodeId {
        self.least[n.index()]
    }

    #[inline]
    pub fn same_class(&self, a: NodeId, b: NodeId) -> bool {
        self.least[a.index()] == self.least[b.index()]
    }

    pub fn class_count(&self) -> usize {
        self.least
            .iter()
            .enumerate()
            .filter(|(i, rep)| rep.index() == *i)
            .count()
    }

    /// Classes in order of their least member, each sorted ascending.
    pub fn classes(&self) -> Vec<Vec<NodeId>> {
        let mut index: HashMap<NodeId, usize> = HashMap::new();
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        for (i, &rep) in self.least.iter().enumerate() {
            let slot = *index.entry(rep).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(NodeId::from_index(i));
        }
        out
    }

    /// Whether every pair related by `self` is related by `other`.
    pub fn is_refined_by(&self, other: &NodePartition) -> bool {
        self.least.len() == other.least.len()
            && self
                .least
                .iter()
                .enumerate()
                .all(|(i, &rep)| other.same_class(NodeId::from_index(i), rep))
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.least
    }
}

/// Union-find with path compression and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len as u32).collect(),
            size: vec![1; len],
        }
    }

    pub(crate) fn find(&mut self, n: NodeId) -> NodeId {
        let mut root = n.0;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = n.0;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        NodeId(root)
    }

    /// Merges the classes of `a` and `b`; returns the surviving root and the
    /// absorbed one, or `None` if they were already merged.
    pub(crate) fn union(&mut self, a: NodeId, b: NodeId) -> Option<(NodeId, NodeId)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (keep, drop) = if self.size[ra.index()] >= self.size[rb.index()] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[drop.index()] = keep.0;
        self.size[keep.index()] += self.size[drop.index()];
        Some((keep, drop))
    }

    pub(crate) fn into_partition(mut self) -> NodePartition {
        let reps: Vec<NodeId> = (0..self.parent.len())
            .map(|i| self.find(NodeId::from_index(i)))
            .collect();
        NodePartition::from_representatives(&reps)
    }
}
