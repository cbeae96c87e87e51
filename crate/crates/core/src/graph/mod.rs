//! Typed attributed graphs.
//!
//! A [`Graph`] is generic over its attribute payload: host graphs carry
//! concrete [`Value`]s, while rule and constraint patterns carry
//! [`AttrExpr`]s that may name variables. Everything else (type graphs,
//! conformance checking, derived edges, matching) lives in the submodules.

mod check;
mod constraint;
mod derived;
pub mod matching;
mod types;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use check::{check_typing, check_typing_with, ConformanceReport, TypingChecks, Violation};
pub use constraint::{check_constraint, check_constraints, Clause, GraphConstraint};
pub use derived::{materialize_derived, strip_derived};
pub use types::{
    AttrKind, DerivationPath, Direction, EdgeType, Multiplicity, NodeType, PathStep, TypeGraph,
    TypeGraphError,
};

/// Identifier of a node within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

/// Identifier of an edge within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A concrete attribute value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn kind(&self) -> AttrKind {
        match self {
            Value::Int(_) => AttrKind::Integer,
            Value::Str(_) => AttrKind::String,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s:?}"),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

/// An attribute term in a pattern: either a constant or a variable bound
/// during matching (or supplied as a rule parameter).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AttrExpr {
    Const(Value),
    Var(String),
}

impl AttrExpr {
    pub fn var(name: &str) -> Self {
        AttrExpr::Var(name.to_owned())
    }

    pub fn as_const(&self) -> Option<&Value> {
        match self {
            AttrExpr::Const(v) => Some(v),
            AttrExpr::Var(_) => None,
        }
    }
}

/// Attribute payloads that can stand on the host side of a match.
///
/// Pattern graphs are used as hosts during overlap analysis; a variable there
/// is an unknown value and unifies with anything.
pub trait HostAttr: Clone + fmt::Debug {
    fn known(&self) -> Option<&Value>;
}

impl HostAttr for Value {
    fn known(&self) -> Option<&Value> {
        Some(self)
    }
}

impl HostAttr for AttrExpr {
    fn known(&self) -> Option<&Value> {
        match self {
            AttrExpr::Const(v) => Some(v),
            AttrExpr::Var(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node<A> {
    pub id: NodeId,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default = "BTreeMap::new", skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, A>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge<A> {
    pub id: EdgeId,
    #[serde(rename = "type")]
    pub ty: String,
    pub src: NodeId,
    pub tgt: NodeId,
    #[serde(default = "BTreeMap::new", skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, A>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} references missing node {node}")]
    MissingEndpoint { edge: EdgeId, node: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("node {node} still has incident edges {edges:?}")]
    Dangling { node: NodeId, edges: Vec<EdgeId> },
    #[error("unknown node type `{0}`")]
    UnknownNodeType(String),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
}

/// A directed multigraph with typed, attributed nodes and edges.
///
/// Edge endpoints always exist: every mutator upholds that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph<A> {
    nodes: BTreeMap<NodeId, Node<A>>,
    edges: BTreeMap<EdgeId, Edge<A>>,
}

/// A host graph.
pub type HostGraph = Graph<Value>;
/// A pattern graph, as used by rules and constraints.
pub type Pattern = Graph<AttrExpr>;

impl<A> Default for Graph<A> {
    fn default() -> Self {
        Graph {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }
}

impl<A: Clone> Graph<A> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node<A>> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge<A>> {
        self.edges.values()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node<A>> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge<A>> {
        self.edges.get(&id)
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.nodes.keys().next_back().map_or(0, |n| n.0 + 1))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn insert_node(
        &mut self,
        id: NodeId,
        ty: impl Into<String>,
        attrs: BTreeMap<String, A>,
    ) -> Result<NodeId, GraphError> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        self.nodes.insert(
            id,
            Node {
                id,
                ty: ty.into(),
                attrs,
            },
        );
        Ok(id)
    }

    /// Adds a node under the next free id.
    pub fn add_node(&mut self, ty: impl Into<String>, attrs: BTreeMap<String, A>) -> NodeId {
        let id = self.next_node_id();
        self.insert_node(id, ty, attrs).expect("fresh id");
        id
    }

    pub fn insert_edge(
        &mut self,
        id: EdgeId,
        ty: impl Into<String>,
        src: NodeId,
        tgt: NodeId,
        attrs: BTreeMap<String, A>,
    ) -> Result<EdgeId, GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        for node in [src, tgt] {
            if !self.nodes.contains_key(&node) {
                return Err(GraphError::MissingEndpoint { edge: id, node });
            }
        }
        self.edges.insert(
            id,
            Edge {
                id,
                ty: ty.into(),
                src,
                tgt,
                attrs,
            },
        );
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        ty: impl Into<String>,
        src: NodeId,
        tgt: NodeId,
    ) -> Result<EdgeId, GraphError> {
        let id = self.next_edge_id();
        self.insert_edge(id, ty, src, tgt, BTreeMap::new())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge<A>, GraphError> {
        self.edges.remove(&id).ok_or(GraphError::UnknownEdge(id))
    }

    /// Removes an isolated node. Fails if any edge is still incident to it.
    pub fn remove_node(&mut self, id: NodeId) -> Result<Node<A>, GraphError> {
        if !self.nodes.contains_key(&id) {
            return Err(GraphError::UnknownNode(id));
        }
        let incident: Vec<EdgeId> = self.incident_edges(id).map(|e| e.id).collect();
        if !incident.is_empty() {
            return Err(GraphError::Dangling {
                node: id,
                edges: incident,
            });
        }
        Ok(self.nodes.remove(&id).expect("checked above"))
    }

    pub fn incident_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge<A>> {
        self.edges.values().filter(move |e| e.src == id || e.tgt == id)
    }

    pub fn out_edges<'a>(&'a self, id: NodeId, ty: &'a str) -> impl Iterator<Item = &'a Edge<A>> {
        self.edges
            .values()
            .filter(move |e| e.src == id && e.ty == ty)
    }

    pub fn in_edges<'a>(&'a self, id: NodeId, ty: &'a str) -> impl Iterator<Item = &'a Edge<A>> {
        self.edges
            .values()
            .filter(move |e| e.tgt == id && e.ty == ty)
    }

    pub fn node_attr(&self, id: NodeId, name: &str) -> Option<&A> {
        self.nodes.get(&id).and_then(|n| n.attrs.get(name))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    /// Replaces every attribute map through `f`, keeping structure and ids.
    pub fn map_attrs<B: Clone>(&self, mut f: impl FnMut(&A) -> B) -> Graph<B> {
        Graph {
            nodes: self
                .nodes
                .iter()
                .map(|(id, n)| {
                    (
                        *id,
                        Node {
                            id: *id,
                            ty: n.ty.clone(),
                            attrs: n.attrs.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
                        },
                    )
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(id, e)| {
                    (
                        *id,
                        Edge {
                            id: *id,
                            ty: e.ty.clone(),
                            src: e.src,
                            tgt: e.tgt,
                            attrs: e.attrs.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> Option<&mut Node<A>> {
        self.nodes.get_mut(&id)
    }

    /// Builds a graph from node and edge lists, checking ids and endpoints.
    pub fn from_parts(
        nodes: impl IntoIterator<Item = Node<A>>,
        edges: impl IntoIterator<Item = Edge<A>>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new();
        for n in nodes {
            g.insert_node(n.id, n.ty, n.attrs)?;
        }
        for e in edges {
            g.insert_edge(e.id, e.ty, e.src, e.tgt, e.attrs)?;
        }
        Ok(g)
    }
}

impl HostGraph {
    /// Name attribute (`n`) of a node, if present and a string.
    pub fn name_of(&self, id: NodeId) -> Option<&str> {
        self.node_attr(id, "n").and_then(Value::as_str)
    }

    /// Stable content digest (hex SHA-256 of the canonical JSON form).
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let doc = serde_json::to_vec(&GraphDoc::from(self)).expect("graph serializes");
        hex::encode(Sha256::digest(doc))
    }
}

/// Serialized form shared by host and pattern graphs: `{nodes, edges}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc<A> {
    #[serde(default = "Vec::new")]
    pub nodes: Vec<Node<A>>,
    #[serde(default = "Vec::new")]
    pub edges: Vec<Edge<A>>,
}

impl<A: Clone> From<&Graph<A>> for GraphDoc<A> {
    fn from(g: &Graph<A>) -> Self {
        GraphDoc {
            nodes: g.nodes().cloned().collect(),
            edges: g.edges().cloned().collect(),
        }
    }
}

impl<A: Clone> TryFrom<GraphDoc<A>> for Graph<A> {
    type Error = GraphError;

    fn try_from(doc: GraphDoc<A>) -> Result<Self, Self::Error> {
        Graph::from_parts(doc.nodes, doc.edges)
    }
}

impl<A: Clone + Serialize> Serialize for Graph<A> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphDoc::from(self).serialize(s)
    }
}

impl<'de, A: Clone + Deserialize<'de>> Deserialize<'de> for Graph<A> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = GraphDoc::<A>::deserialize(d)?;
        Graph::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Attribute map helper: `attrs([("n", "Order".into())])`.
pub fn attrs<A, const N: usize>(items: [(&str, A); N]) -> BTreeMap<String, A> {
    items.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_need_endpoints() {
        let mut g = HostGraph::new();
        let a = g.add_node("Component", BTreeMap::new());
        assert_eq!(
            g.add_edge("uses", a, NodeId(7)),
            Err(GraphError::MissingEndpoint {
                edge: EdgeId(0),
                node: NodeId(7)
            })
        );
    }

    #[test]
    fn remove_node_refuses_dangling() {
        let mut g = HostGraph::new();
        let a = g.add_node("Component", BTreeMap::new());
        let b = g.add_node("ProvPort", BTreeMap::new());
        let e = g.add_edge("hasPort", a, b).unwrap();
        assert!(matches!(g.remove_node(b), Err(GraphError::Dangling { .. })));
        g.remove_edge(e).unwrap();
        g.remove_node(b).unwrap();
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn digest_tracks_content() {
        let mut g = HostGraph::new();
        let d0 = g.digest();
        g.add_node("Component", attrs([("n", Value::from("A"))]));
        assert_ne!(d0, g.digest());
        assert_eq!(g.digest(), g.clone().digest());
    }
}
