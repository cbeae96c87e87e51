use std::collections::{BTreeMap, BTreeSet};

use super::metamodel::{check_graph, cosa_type_graph, ty, NAME};
use super::model::{
    ArchError, Architecture, Attachment, Binding, Component, ComponentKind, ComponentPath, Connector,
    Port, PortDirection, PortRef, Role, RoleRef, Uses,
};
use crate::graph::{
    strip_derived, ConformanceReport, EdgeId, GraphError, HostGraph, NodeId, TypeGraph, Value,
};

/// Encoding result with the element-to-node index.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub graph: HostGraph,
    pub components: BTreeMap<ComponentPath, NodeId>,
    pub configurations: BTreeMap<ComponentPath, NodeId>,
    pub ports: BTreeMap<PortRef, NodeId>,
    pub connectors: BTreeMap<String, NodeId>,
    pub roles: BTreeMap<RoleRef, NodeId>,
}

fn named(name: &str) -> BTreeMap<String, Value> {
    [(NAME.to_owned(), Value::from(name))].into()
}

fn kind_type(kind: ComponentKind) -> &'static str {
    match kind {
        ComponentKind::Plain => ty::COMPONENT,
        ComponentKind::Client => ty::CLIENT,
        ComponentKind::Server => ty::SERVER,
    }
}

fn port_type(d: PortDirection) -> &'static str {
    match d {
        PortDirection::Provided => ty::PROV_PORT,
        PortDirection::Required => ty::REQ_PORT,
    }
}

fn role_type(d: PortDirection) -> &'static str {
    match d {
        PortDirection::Provided => ty::PROV_ROLE,
        PortDirection::Required => ty::REQ_ROLE,
    }
}

/// Encodes an architecture whose references resolve as a graph over the metamodel. Node ids
/// follow declaration order: components depth first (component,
/// configuration, ports, children), then connectors with their roles.
pub fn encode(a: &Architecture) -> Result<HostGraph, ArchError> {
    encode_indexed(a).map(|e| e.graph)
}

pub fn encode_indexed(a: &Architecture) -> Result<Encoding, ArchError> {
    a.check_references()?;
    let mut enc = Encoding {
        graph: HostGraph::new(),
        components: BTreeMap::new(),
        configurations: BTreeMap::new(),
        ports: BTreeMap::new(),
        connectors: BTreeMap::new(),
        roles: BTreeMap::new(),
    };
    let mut edges: Vec<(&str, NodeId, NodeId)> = Vec::new();

    fn component(
        enc: &mut Encoding,
        edges: &mut Vec<(&'static str, NodeId, NodeId)>,
        path: ComponentPath,
        c: &Component,
        container: Option<NodeId>,
    ) {
        let g = &mut enc.graph;
        let id = g.add_node(kind_type(c.kind), named(&c.name));
        if let Some(k) = container {
            edges.push((ty::CONTAINS, k, id));
        }
        let config = c.configuration.as_ref().map(|_| {
            let k = g.add_node(ty::CONFIGURATION, named(&c.name));
            edges.push((ty::HAS_CONFIG, id, k));
            k
        });
        for p in &c.ports {
            let pid = g.add_node(port_type(p.direction), named(&p.name));
            edges.push((ty::HAS_PORT, id, pid));
            enc.ports.insert(path.port(&p.name), pid);
        }
        enc.components.insert(path.clone(), id);
        if let Some(k) = config {
            enc.configurations.insert(path.clone(), k);
        }
        for child in c.children() {
            component(enc, edges, path.child(&child.name), child, config);
        }
    }
    for c in &a.components {
        component(&mut enc, &mut edges, ComponentPath::top(&c.name), c, None);
    }
    for k in &a.connectors {
        let kid = enc.graph.add_node(ty::CONNECTOR, named(&k.name));
        enc.connectors.insert(k.name.clone(), kid);
        for r in &k.roles {
            let rid = enc.graph.add_node(role_type(r.direction), named(&r.name));
            edges.push((ty::HAS_ROLE, kid, rid));
            enc.roles.insert(RoleRef::new(&k.name, &r.name), rid);
        }
    }
    for at in &a.attachments {
        edges.push((ty::ATTACHMENT, enc.ports[&at.port], enc.roles[&at.role]));
    }
    for b in &a.bindings {
        edges.push((ty::BINDING, enc.ports[&b.outer], enc.ports[&b.inner]));
    }
    for u in &a.uses {
        edges.push((ty::USES, enc.ports[&u.from], enc.ports[&u.to]));
    }
    for (t, s, d) in edges {
        enc.graph.add_edge(t, s, d).expect("encoded endpoints exist");
    }
    Ok(enc)
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("graph does not conform to the architecture metamodel ({} violation(s))", .0.violations.len())]
    NonConformant(ConformanceReport),
    #[error("graph is not a well-formed architecture: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] ArchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

struct Reader<'a> {
    g: &'a HostGraph,
}

impl Reader<'_> {
    fn name(&self, n: NodeId) -> Result<String, DecodeError> {
        self.g
            .name_of(n)
            .map(str::to_owned)
            .ok_or_else(|| DecodeError::Malformed(format!("node {n} has no name")))
    }

    fn ty(&self, n: NodeId) -> &str {
        &self.g.node(n).expect("node").ty
    }

    /// Targets of outgoing edges of a type, ordered by edge id.
    fn out(&self, n: NodeId, edge: &str) -> Vec<NodeId> {
        let mut v: Vec<(EdgeId, NodeId)> = self.g.out_edges(n, edge).map(|e| (e.id, e.tgt)).collect();
        v.sort();
        v.into_iter().map(|(_, t)| t).collect()
    }

    fn sorted_by_node(&self, mut v: Vec<NodeId>) -> Vec<NodeId> {
        v.sort();
        v
    }

    fn direction(&self, n: NodeId, tg: &TypeGraph) -> PortDirection {
        let t = self.ty(n);
        if tg.is_subtype(t, ty::PROV_PORT) || tg.is_subtype(t, ty::PROV_ROLE) {
            PortDirection::Provided
        } else {
            PortDirection::Required
        }
    }
}

/// Inverse of [`encode`]. The graph must conform to the metamodel and the
/// base invariants; derived edges are ignored. Children and ports keep
/// node-id order, relation lists keep edge-id order.
pub fn decode(g: &HostGraph, name: &str) -> Result<Architecture, DecodeError> {
    decode_over(g, name, cosa_type_graph())
}

/// [`decode`] against an extended type graph (e.g. a style's).
pub fn decode_over(g: &HostGraph, name: &str, tg: &TypeGraph) -> Result<Architecture, DecodeError> {
    let g = &strip_derived(g, tg);
    let report = check_graph(g, tg, &[])?;
    if !report.ok {
        return Err(DecodeError::NonConformant(report));
    }
    let r = Reader { g };

    let mut contained = BTreeSet::new();
    for e in g.edges().filter(|e| e.ty == ty::CONTAINS) {
        contained.insert(e.tgt);
    }
    let comps: Vec<NodeId> = g
        .nodes()
        .filter(|n| tg.is_subtype(&n.ty, ty::COMPONENT))
        .map(|n| n.id)
        .collect();
    let mut paths: BTreeMap<NodeId, PortRef> = BTreeMap::new();
    let mut visited = BTreeSet::new();

    fn build(
        r: &Reader<'_>,
        tg: &TypeGraph,
        id: NodeId,
        path: ComponentPath,
        paths: &mut BTreeMap<NodeId, PortRef>,
        visited: &mut BTreeSet<NodeId>,
    ) -> Result<Component, DecodeError> {
        if !visited.insert(id) {
            return Err(DecodeError::Malformed(format!("containment cycle through {path}")));
        }
        let t = r.ty(id);
        let kind = if tg.is_subtype(t, ty::SERVER) {
            ComponentKind::Server
        } else if tg.is_subtype(t, ty::CLIENT) {
            ComponentKind::Client
        } else {
            ComponentKind::Plain
        };
        let mut c = Component::new(&r.name(id)?).with_kind(kind);
        for p in r.sorted_by_node(r.out(id, ty::HAS_PORT)) {
            let port = Port {
                name: r.name(p)?,
                direction: r.direction(p, tg),
            };
            paths.insert(p, path.port(&port.name));
            c.ports.push(port);
        }
        if let Some(&config) = r.out(id, ty::HAS_CONFIG).first() {
            let mut children = Vec::new();
            for child in r.sorted_by_node(r.out(config, ty::CONTAINS)) {
                let name = r.name(child)?;
                children.push(build(r, tg, child, path.child(&name), paths, visited)?);
            }
            c.configuration = Some(children);
        }
        Ok(c)
    }

    let mut arch = Architecture::new(name);
    for &c in comps.iter().filter(|c| !contained.contains(c)) {
        let name = r.name(c)?;
        arch.components
            .push(build(&r, tg, c, ComponentPath::top(&name), &mut paths, &mut visited)?);
    }
    if let Some(lost) = comps.iter().find(|c| !visited.contains(c)) {
        return Err(DecodeError::Malformed(format!(
            "component {} is unreachable from the top level",
            r.name(*lost)?
        )));
    }

    let mut roles: BTreeMap<NodeId, RoleRef> = BTreeMap::new();
    for k in g.nodes().filter(|n| n.ty == ty::CONNECTOR) {
        let name = r.name(k.id)?;
        let mut conn = Connector {
            name: name.clone(),
            roles: Vec::new(),
        };
        for role in r.sorted_by_node(r.out(k.id, ty::HAS_ROLE)) {
            let rn = r.name(role)?;
            roles.insert(role, RoleRef::new(&name, &rn));
            conn.roles.push(Role {
                name: rn,
                direction: r.direction(role, tg),
            });
        }
        arch.connectors.push(conn);
    }

    let port = |n: NodeId| -> Result<PortRef, DecodeError> {
        paths
            .get(&n)
            .cloned()
            .ok_or_else(|| DecodeError::Malformed(format!("port node {n} has no owner")))
    };
    for e in g.edges() {
        match e.ty.as_str() {
            ty::ATTACHMENT => arch.attachments.push(Attachment {
                port: port(e.src)?,
                role: roles
                    .get(&e.tgt)
                    .cloned()
                    .ok_or_else(|| DecodeError::Malformed(format!("role node {} has no connector", e.tgt)))?,
            }),
            ty::BINDING => arch.bindings.push(Binding {
                outer: port(e.src)?,
                inner: port(e.tgt)?,
            }),
            ty::USES => arch.uses.push(Uses {
                from: port(e.src)?,
                to: port(e.tgt)?,
            }),
            _ => {}
        }
    }
    arch.validate()?;
    Ok(arch)
}
