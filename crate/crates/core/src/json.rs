//! JSON file formats for graphs and queries.
//!
//! A graph is `{"nodes": [...], "roots": [...]}` where every node is one of
//!
//! ```text
//! {"id": 0, "kind": "app", "left": 1, "right": 2}
//! {"id": 1, "kind": "abs", "body": 3}
//! {"id": 3, "kind": "bvar", "binder": 1}
//! {"id": 2, "kind": "fvar", "name": "x"}
//! ```
//!
//! `roots` is optional; its entries are ids or `{"id": 0, "label": "a"}` and
//! must list exactly the nodes without parents. A query is an array of pairs
//! of root ids or root labels, e.g. `[[0, "b"]]`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::checker::Query;
use crate::graph::{build_graph_with, AtomTable, BuildOptions, GraphError, LamGraph, NodeId, NodeKind};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("node {id}: {message}")]
    Node { id: u32, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown root label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate root label {0:?}")]
    DuplicateLabel(String),
    #[error("query entry {index}: {message}")]
    Query { index: usize, message: String },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeJson {
    id: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    body: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    binder: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RootJson {
    Id(u32),
    Labeled(LabeledRoot),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabeledRoot {
    id: u32,
    label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    nodes: Vec<NodeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots: Option<Vec<RootJson>>,
}

/// A parsed graph file: the graph and the labels given to its roots.
#[derive(Clone, Debug)]
pub struct GraphDocument {
    pub graph: LamGraph,
    pub labels: HashMap<String, NodeId>,
}

impl GraphDocument {
    /// Resolves a root given as a JSON id or label.
    pub fn resolve(&self, v: &Value) -> Option<NodeId> {
        match v {
            Value::Number(n) => n.as_u64().and_then(|i| u32::try_from(i).ok()).map(NodeId),
            Value::String(s) => self.labels.get(s).copied(),
            _ => None,
        }
    }
}

fn node_kind(node: &NodeJson, atoms: &mut AtomTable) -> Result<NodeKind, JsonError> {
    let err = |message: String| JsonError::Node {
        id: node.id,
        message,
    };
    let present = [
        ("left", node.left.is_some()),
        ("right", node.right.is_some()),
        ("body", node.body.is_some()),
        ("binder", node.binder.is_some()),
        ("name", node.name.is_some()),
    ];
    let allowed: &[&str] = match node.kind.as_str() {
        "app" => &["left", "right"],
        "abs" => &["body"],
        "bvar" => &["binder"],
        "fvar" => &["name"],
        other => return Err(err(format!("unknown kind {other:?}"))),
    };
    for (field, is_present) in present {
        let wanted = allowed.contains(&field);
        if is_present != wanted {
            let verb = if wanted { "missing" } else { "unexpected" };
            return Err(err(format!("{verb} field {field:?} for kind {:?}", node.kind)));
        }
    }
    Ok(match node.kind.as_str() {
        "app" => NodeKind::App {
            left: NodeId(node.left.unwrap_or_default()),
            right: NodeId(node.right.unwrap_or_default()),
        },
        "abs" => NodeKind::Abs {
            body: NodeId(node.body.unwrap_or_default()),
        },
        "bvar" => NodeKind::BoundVar {
            binder: NodeId(node.binder.unwrap_or_default()),
        },
        // A repeated name yields a second node on the same atom, which graph
        // construction rejects.
        _ => NodeKind::FreeVar {
            atom: atoms.intern(node.name.as_deref().unwrap_or_default()),
        },
    })
}

/// Parses and validates a graph file.
pub fn parse_graph(text: &str, options: BuildOptions) -> Result<GraphDocument, JsonError> {
    let file: GraphJson = serde_json::from_str(text)?;
    let mut atoms = AtomTable::new();
    let spec = file
        .nodes
        .iter()
        .map(|n| Ok((NodeId(n.id), node_kind(n, &mut atoms)?)))
        .collect::<Result<Vec<_>, JsonError>>()?;
    let graph = build_graph_with(spec, atoms, options)?;
    let mut labels = HashMap::new();
    if let Some(roots) = &file.roots {
        let mut declared = Vec::with_capacity(roots.len());
        for r in roots {
            match r {
                RootJson::Id(id) => declared.push(NodeId(*id)),
                RootJson::Labeled(LabeledRoot { id, label }) => {
                    declared.push(NodeId(*id));
                    if labels.insert(label.clone(), NodeId(*id)).is_some() {
                        return Err(JsonError::DuplicateLabel(label.clone()));
                    }
                }
            }
        }
        graph.check_declared_roots(&declared)?;
    }
    Ok(GraphDocument { graph, labels })
}

/// Parses a query file against a graph document. Endpoints are not checked
/// to be roots here; the checker does that.
pub fn parse_query(text: &str, doc: &GraphDocument) -> Result<Query, JsonError> {
    let pairs: Vec<Value> = serde_json::from_str(text)?;
    pairs
        .iter()
        .enumerate()
        .map(|(index, pair)| {
            let err = |message: &str| JsonError::Query {
                index,
                message: message.to_string(),
            };
            let items = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| err("expected a pair [root, root]"))?;
            let mut ends = [NodeId(0); 2];
            for (slot, item) in ends.iter_mut().zip(items) {
                *slot = match item {
                    Value::String(s) => *doc
                        .labels
                        .get(s)
                        .ok_or_else(|| JsonError::UnknownLabel(s.clone()))?,
                    _ => doc
                        .resolve(item)
                        .ok_or_else(|| err("expected a node id or a root label"))?,
                };
            }
            Ok((ends[0], ends[1]))
        })
        .collect()
}

/// Serializes `g` in the graph file format, with its roots listed.
pub fn graph_to_json(g: &LamGraph) -> String {
    let nodes = g
        .node_ids()
        .map(|id| {
            let mut n = NodeJson {
                id: id.0,
                ..Default::default()
            };
            match g.kind(id) {
                NodeKind::App { left, right } => {
                    n.kind = "app".into();
                    n.left = Some(left.0);
                    n.right = Some(right.0);
                }
                NodeKind::Abs { body } => {
                    n.kind = "abs".into();
                    n.body = Some(body.0);
                }
                NodeKind::BoundVar { binder } => {
                    n.kind = "bvar".into();
                    n.binder = Some(binder.0);
                }
                NodeKind::FreeVar { atom } => {
                    n.kind = "fvar".into();
                    n.name = Some(g.atoms().name(atom).to_string());
                }
            }
            n
        })
        .collect();
    let file = GraphJson {
        nodes,
        roots: Some(g.roots().iter().map(|r| RootJson::Id(r.0)).collect()),
    };
    serde_json::to_string_pretty(&file).expect("graph serializes")
}
