use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::graph::{
    check_constraints, check_typing, materialize_derived, AttrExpr, AttrKind, ConformanceReport, EdgeType,
    GraphConstraint, GraphError, HostGraph, Multiplicity, NodeId, NodeType, PathStep, Pattern, TypeGraph,
};

/// Node and edge type names of the architecture metamodel.
pub mod ty {
    pub const COMPONENT: &str = "Component";
    pub const CLIENT: &str = "Client";
    pub const SERVER: &str = "Server";
    pub const CONFIGURATION: &str = "Configuration";
    pub const PORT: &str = "Port";
    pub const PROV_PORT: &str = "ProvPort";
    pub const REQ_PORT: &str = "ReqPort";
    pub const CONNECTOR: &str = "Connector";
    pub const ROLE: &str = "Role";
    pub const PROV_ROLE: &str = "ProvRole";
    pub const REQ_ROLE: &str = "ReqRole";

    pub const HAS_PORT: &str = "hasPort";
    pub const HAS_ROLE: &str = "hasRole";
    pub const HAS_CONFIG: &str = "hasConfig";
    pub const CONTAINS: &str = "contains";
    pub const ATTACHMENT: &str = "attachment";
    pub const BINDING: &str = "binding";
    pub const USES: &str = "uses";
    /// Derived: required port to the provided port across a connector.
    pub const LINKED_TO: &str = "linkedTo";
    /// Derived: component owning a required port to the component owning the linked provided port.
    pub const CONNECTS_TO: &str = "connectsTo";
}

/// Name attribute carried by every node.
pub const NAME: &str = "n";

fn build_type_graph() -> TypeGraph {
    use ty::*;
    use Multiplicity as M;
    let named = |t: NodeType| t.with_attr(NAME, AttrKind::String);
    TypeGraph::new(
        vec![
            named(NodeType::concrete(COMPONENT)),
            NodeType::concrete(CLIENT).with_supertype(COMPONENT),
            NodeType::concrete(SERVER).with_supertype(COMPONENT),
            named(NodeType::concrete(CONFIGURATION)),
            named(NodeType::abstract_type(PORT)),
            NodeType::concrete(PROV_PORT).with_supertype(PORT),
            NodeType::concrete(REQ_PORT).with_supertype(PORT),
            named(NodeType::concrete(CONNECTOR)),
            named(NodeType::abstract_type(ROLE)),
            NodeType::concrete(PROV_ROLE).with_supertype(ROLE),
            NodeType::concrete(REQ_ROLE).with_supertype(ROLE),
        ],
        vec![
            EdgeType::new(HAS_PORT, COMPONENT, PORT).mult(M::ONE, M::ANY),
            EdgeType::new(HAS_ROLE, CONNECTOR, ROLE).mult(M::ONE, M::ANY),
            EdgeType::new(HAS_CONFIG, COMPONENT, CONFIGURATION).mult(M::ONE, M::OPTIONAL),
            EdgeType::new(CONTAINS, CONFIGURATION, COMPONENT).mult(M::OPTIONAL, M::ANY),
            EdgeType::new(ATTACHMENT, PORT, ROLE).mult(M::OPTIONAL, M::ANY),
            EdgeType::new(BINDING, PORT, PORT),
            EdgeType::new(USES, PORT, PORT),
            EdgeType::new(LINKED_TO, REQ_PORT, PROV_PORT).derived(vec![
                PathStep::fwd(ATTACHMENT, REQ_ROLE),
                PathStep::bwd(HAS_ROLE, CONNECTOR),
                PathStep::fwd(HAS_ROLE, PROV_ROLE),
                PathStep::bwd(ATTACHMENT, PROV_PORT),
            ]),
            EdgeType::new(CONNECTS_TO, COMPONENT, COMPONENT).derived(vec![
                PathStep::fwd(HAS_PORT, REQ_PORT),
                PathStep::fwd(LINKED_TO, PROV_PORT),
                PathStep::bwd(HAS_PORT, COMPONENT),
            ]),
        ],
    )
    .expect("metamodel is well formed")
}

/// The architecture metamodel. Client and Server are present as Component
/// subtypes without count bounds; styles refine them.
pub fn cosa_type_graph() -> &'static TypeGraph {
    static TG: OnceLock<TypeGraph> = OnceLock::new();
    TG.get_or_init(build_type_graph)
}

/// Terse pattern construction with explicit ids shared across a rule or
/// constraint.
#[derive(Debug, Clone, Default)]
pub(crate) struct Pat(pub Pattern);

impl Pat {
    pub fn new() -> Self {
        Pat::default()
    }

    pub fn n(mut self, id: u32, ty: &str) -> Self {
        self.0.insert_node(NodeId(id), ty, BTreeMap::new()).expect("fresh id");
        self
    }

    /// Node whose name attribute is the variable `var`.
    pub fn named(mut self, id: u32, ty: &str, var: &str) -> Self {
        let attrs = [(NAME.to_owned(), AttrExpr::var(var))].into();
        self.0.insert_node(NodeId(id), ty, attrs).expect("fresh id");
        self
    }

    pub fn e(mut self, id: u32, ty: &str, src: u32, tgt: u32) -> Self {
        self.0
            .insert_edge(crate::graph::EdgeId(id), ty, NodeId(src), NodeId(tgt), BTreeMap::new())
            .expect("endpoints exist");
        self
    }

    /// Replaces the type of an existing node (refinement in conclusions and NACs).
    pub fn retype(mut self, id: u32, ty: &str) -> Self {
        let node = self.0.node_mut(NodeId(id)).expect("node exists");
        node.ty = ty.to_owned();
        self
    }

    pub fn done(self) -> Pattern {
        self.0
    }
}

fn forbidden_self_edge(node_ty: &str, edge_ty: &str) -> Pattern {
    Pat::new().n(1, node_ty).e(2, edge_ty, 1, 1).done()
}

/// `1` owns port `3` and is the parent of `5`, which owns port `4`.
fn binding_conclusion(port_ty: &str) -> Pattern {
    use ty::*;
    Pat::new()
        .n(1, port_ty)
        .n(2, port_ty)
        .e(3, BINDING, 1, 2)
        .n(4, COMPONENT)
        .e(5, HAS_PORT, 4, 1)
        .n(6, CONFIGURATION)
        .e(7, HAS_CONFIG, 4, 6)
        .n(8, COMPONENT)
        .e(9, CONTAINS, 6, 8)
        .e(10, HAS_PORT, 8, 2)
        .done()
}

/// Containment of `2` in `1`'s configuration, optionally with a connection.
fn contains_with(link: Option<(u32, u32)>) -> Pattern {
    use ty::*;
    let p = Pat::new()
        .n(1, COMPONENT)
        .n(2, COMPONENT)
        .n(3, CONFIGURATION)
        .e(4, HAS_CONFIG, 1, 3)
        .e(5, CONTAINS, 3, 2);
    match link {
        Some((s, t)) => p.e(6, CONNECTS_TO, s, t).done(),
        None => p.done(),
    }
}

/// The four base well-formedness invariants of the ADL.
pub fn base_invariants() -> Vec<GraphConstraint> {
    use ty::*;
    let self_containment = Pat::new()
        .n(1, COMPONENT)
        .n(2, CONFIGURATION)
        .e(3, HAS_CONFIG, 1, 2)
        .e(4, CONTAINS, 2, 1)
        .done();
    let i = GraphConstraint::forbidden(
        "base-i",
        "a component may not be connected to, or contained in, itself",
        vec![forbidden_self_edge(COMPONENT, CONNECTS_TO), self_containment],
    );

    let bound = Pat::new().n(1, PORT).n(2, PORT).e(3, BINDING, 1, 2).done();
    let mut ii = GraphConstraint::conditional(
        "base-ii",
        "a binding joins two ports of the same direction, from a component to a port of one of its direct children",
        bound,
        vec![binding_conclusion(PROV_PORT), binding_conclusion(REQ_PORT)],
    );
    ii.clauses
        .insert(0, crate::graph::Clause::Forbidden(forbidden_self_edge(PORT, BINDING)));

    let used = Pat::new().n(1, PORT).n(2, PORT).e(3, USES, 1, 2).done();
    let same_owner = Pat(used.clone())
        .n(4, COMPONENT)
        .e(5, HAS_PORT, 4, 1)
        .e(6, HAS_PORT, 4, 2)
        .done();
    let mut iii = GraphConstraint::conditional(
        "base-iii",
        "a uses dependency joins two different ports of the same component",
        used,
        vec![same_owner],
    );
    iii.clauses
        .insert(0, crate::graph::Clause::Forbidden(forbidden_self_edge(PORT, USES)));

    let iv = GraphConstraint::forbidden(
        "base-iv",
        "a component may not be both connected to and contained in another one",
        vec![contains_with(Some((1, 2))), contains_with(Some((2, 1)))],
    );
    vec![i, ii, iii, iv]
}

/// Checks a graph (derived edges recomputed) against a type graph, the base
/// invariants and any extra constraints.
pub fn check_graph(
    g: &HostGraph,
    tg: &TypeGraph,
    extra: &[GraphConstraint],
) -> Result<ConformanceReport, GraphError> {
    let m = materialize_derived(g, tg);
    let mut report = check_typing(&m, tg)?;
    report.merge(check_constraints(&m, &base_invariants(), tg)?);
    report.merge(check_constraints(&m, extra, tg)?);
    Ok(report)
}
