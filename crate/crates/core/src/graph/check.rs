use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EdgeId, Graph, GraphError, HostAttr, NodeId, TypeGraph, Value};

/// One conformance violation with the elements that witness it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
    #[serde(default)]
    pub nodes: BTreeSet<NodeId>,
    #[serde(default)]
    pub edges: BTreeSet<EdgeId>,
}

impl Violation {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Violation {
            code: code.to_owned(),
            message: message.into(),
            nodes: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn with_nodes(mut self, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        self.nodes.extend(nodes);
        self
    }

    pub fn with_edges(mut self, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        self.edges.extend(edges);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ConformanceReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn ok() -> Self {
        Self::from_violations(Vec::new())
    }

    pub fn merge(&mut self, other: ConformanceReport) {
        self.violations.extend(other.violations);
        self.ok = self.violations.is_empty();
    }

    pub fn with_code<'a>(&'a self, code: &'a str) -> impl Iterator<Item = &'a Violation> {
        self.violations.iter().filter(move |v| v.code == code)
    }
}

/// Which families of typing rules to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypingChecks {
    pub endpoints: bool,
    pub multiplicities: bool,
    pub node_counts: bool,
    pub attributes: bool,
}

impl TypingChecks {
    pub const ALL: TypingChecks = TypingChecks {
        endpoints: true,
        multiplicities: true,
        node_counts: true,
        attributes: true,
    };

    /// Edge endpoint typing and abstract instantiation only.
    pub const STRUCTURAL: TypingChecks = TypingChecks {
        endpoints: true,
        multiplicities: false,
        node_counts: false,
        attributes: false,
    };
}

pub(crate) fn label<A: HostAttr>(g: &Graph<A>, id: NodeId) -> String {
    match g.node(id) {
        Some(n) => match n.attrs.get("n").and_then(|a| a.known()) {
            Some(Value::Str(s)) => format!("{} '{s}'", n.ty),
            _ => format!("{} {id}", n.ty),
        },
        None => id.to_string(),
    }
}

/// Checks every typing rule of `tg` against `g`.
pub fn check_typing<A: HostAttr>(g: &Graph<A>, tg: &TypeGraph) -> Result<ConformanceReport, GraphError> {
    check_typing_with(g, tg, TypingChecks::ALL)
}

pub fn check_typing_with<A: HostAttr>(
    g: &Graph<A>,
    tg: &TypeGraph,
    checks: TypingChecks,
) -> Result<ConformanceReport, GraphError> {
    for n in g.nodes() {
        if tg.node_type(&n.ty).is_none() {
            return Err(GraphError::UnknownNodeType(n.ty.clone()));
        }
    }
    for e in g.edges() {
        if tg.edge_type(&e.ty).is_none() {
            return Err(GraphError::UnknownEdgeType(e.ty.clone()));
        }
    }

    let mut out = Vec::new();
    for n in g.nodes() {
        if !tg.is_concrete(&n.ty) {
            out.push(
                Violation::new(
                    "abstract-node",
                    format!("{} instantiates abstract type {}", label(g, n.id), n.ty),
                )
                .with_nodes([n.id]),
            );
        }
    }

    if checks.endpoints {
        for e in g.edges() {
            let et = tg.edge_type(&e.ty).expect("checked above");
            let src = &g.node(e.src).expect("endpoint").ty;
            let tgt = &g.node(e.tgt).expect("endpoint").ty;
            if !tg.is_subtype(src, &et.source) || !tg.is_subtype(tgt, &et.target) {
                out.push(
                    Violation::new(
                        "edge-endpoint",
                        format!(
                            "{} edge from {} to {} must run from {} to {}",
                            e.ty,
                            label(g, e.src),
                            label(g, e.tgt),
                            et.source,
                            et.target
                        ),
                    )
                    .with_nodes([e.src, e.tgt])
                    .with_edges([e.id]),
                );
            }
        }
    }

    if checks.multiplicities {
        let mut outgoing: BTreeMap<(NodeId, &str), Vec<EdgeId>> = BTreeMap::new();
        let mut incoming: BTreeMap<(NodeId, &str), Vec<EdgeId>> = BTreeMap::new();
        for e in g.edges() {
            outgoing.entry((e.src, e.ty.as_str())).or_default().push(e.id);
            incoming.entry((e.tgt, e.ty.as_str())).or_default().push(e.id);
        }
        for et in tg.edge_types() {
            for n in g.nodes() {
                if tg.is_subtype(&n.ty, &et.target) {
                    let found = incoming.get(&(n.id, et.name.as_str())).map_or(&[][..], |v| v);
                    if !et.source_mult.contains(found.len()) {
                        out.push(
                            Violation::new(
                                "edge-multiplicity",
                                format!(
                                    "{} must connect to {} {} via {} (found {}): {}",
                                    et.target,
                                    et.source_mult,
                                    et.source,
                                    et.name,
                                    found.len(),
                                    label(g, n.id)
                                ),
                            )
                            .with_nodes([n.id])
                            .with_edges(found.iter().copied()),
                        );
                    }
                }
                if tg.is_subtype(&n.ty, &et.source) {
                    let found = outgoing.get(&(n.id, et.name.as_str())).map_or(&[][..], |v| v);
                    if !et.target_mult.contains(found.len()) {
                        out.push(
                            Violation::new(
                                "edge-multiplicity",
                                format!(
                                    "{} must have {} {} via {} (found {}): {}",
                                    et.source,
                                    et.target_mult,
                                    et.target,
                                    et.name,
                                    found.len(),
                                    label(g, n.id)
                                ),
                            )
                            .with_nodes([n.id])
                            .with_edges(found.iter().copied()),
                        );
                    }
                }
            }
        }
    }

    if checks.node_counts {
        for nt in tg.node_types() {
            let members: Vec<NodeId> = g
                .nodes()
                .filter(|n| tg.is_subtype(&n.ty, &nt.name))
                .map(|n| n.id)
                .collect();
            if !nt.count.contains(members.len()) {
                out.push(
                    Violation::new(
                        "node-count",
                        format!(
                            "expected {} {} node(s), found {}",
                            nt.count,
                            nt.name,
                            members.len()
                        ),
                    )
                    .with_nodes(members),
                );
            }
        }
    }

    if checks.attributes {
        for n in g.nodes() {
            let declared = tg.all_attributes(&n.ty);
            for (name, kind) in &declared {
                match n.attrs.get(name) {
                    None => out.push(
                        Violation::new(
                            "attribute-missing",
                            format!("{} lacks attribute `{name}`", label(g, n.id)),
                        )
                        .with_nodes([n.id]),
                    ),
                    Some(v) => {
                        if let Some(val) = v.known() {
                            if val.kind() != *kind {
                                out.push(
                                    Violation::new(
                                        "attribute-kind",
                                        format!("{}: attribute `{name}` must be {kind:?}", label(g, n.id)),
                                    )
                                    .with_nodes([n.id]),
                                );
                            }
                        }
                    }
                }
            }
            for name in n.attrs.keys() {
                if !declared.iter().any(|(d, _)| d == name) {
                    out.push(
                        Violation::new(
                            "attribute-undeclared",
                            format!("{} carries undeclared attribute `{name}`", label(g, n.id)),
                        )
                        .with_nodes([n.id]),
                    );
                }
            }
        }
    }

    Ok(ConformanceReport::from_violations(out))
}
