//! Random architectures, random operations and an independent reachability
//! oracle shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use archevol_core::cosa::{
    Architecture, Attachment, Binding, Component, ComponentPath, Connector, Port, PortDirection, PortRef, RoleRef,
    Uses,
};
use archevol_core::evolution::{OperationDescriptor, OperationName};
use rand::seq::SliceRandom;
use rand::Rng;

const PORT_NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Up to six top-level components with up to four ports each, acyclic uses
/// inside components and binary connectors between distinct components.
pub fn random_architecture(rng: &mut impl Rng) -> Architecture {
    let mut a = Architecture::new("random");
    let n = rng.gen_range(1..=6);
    for i in 0..n {
        let k = rng.gen_range(1..=4);
        let ports = PORT_NAMES[..k].iter().map(|p| {
            if rng.gen_bool(0.5) {
                Port::provided(p)
            } else {
                Port::required(p)
            }
        });
        let ports: Vec<Port> = ports.collect();
        let path = ComponentPath::top(&format!("C{i}"));
        for x in 0..k {
            for y in 0..x {
                if rng.gen_bool(0.35) {
                    a.uses.push(Uses {
                        from: path.port(PORT_NAMES[x]),
                        to: path.port(PORT_NAMES[y]),
                    });
                }
            }
        }
        a.components.push(Component::new(&format!("C{i}")).with_ports(ports));
    }
    let ends = |d: PortDirection| -> Vec<PortRef> {
        a.port_refs()
            .into_iter()
            .filter(|r| a.port(r).is_some_and(|p| p.direction == d))
            .collect()
    };
    let (provided, required) = (ends(PortDirection::Provided), ends(PortDirection::Required));
    let mut connectors = Vec::new();
    for i in 0..rng.gen_range(0..=n) {
        let (Some(p), Some(r)) = (provided.choose(rng), required.choose(rng)) else { break };
        if p.component == r.component {
            continue;
        }
        connectors.push((format!("K{i}"), p.clone(), r.clone()));
    }
    for (name, p, r) in connectors {
        a.connectors.push(Connector::binary(&name));
        a.attachments.push(Attachment {
            port: p,
            role: RoleRef::new(&name, "prov"),
        });
        a.attachments.push(Attachment {
            port: r,
            role: RoleRef::new(&name, "req"),
        });
    }
    a
}

fn siblings(paths: &[ComponentPath], of: &ComponentPath) -> Vec<ComponentPath> {
    paths
        .iter()
        .filter(|p| *p != of && p.parent() == of.parent())
        .cloned()
        .collect()
}

/// A random operation with parameters drawn from `a`. Deletion is left out
/// because it drops dependencies by design.
pub fn random_operation(a: &Architecture, rng: &mut impl Rng) -> Option<OperationDescriptor> {
    let comps = a.component_paths();
    let ports = a.port_refs();
    let nested: Vec<&ComponentPath> = comps.iter().filter(|p| p.parent().is_some()).collect();
    let pick = |rng: &mut _| comps.choose(rng).cloned();
    match rng.gen_range(0..7) {
        0 => {
            let parent = if rng.gen_bool(0.5) { pick(rng).map(|p| p.to_string()) } else { None };
            Some(
                OperationDescriptor::new(OperationName::Create, parent.unwrap_or_default())
                    .with_param("name", format!("N{}", rng.gen_range(0..100))),
            )
        }
        1 => {
            let c = pick(rng)?;
            let p = siblings(&comps, &c).choose(rng)?.clone();
            Some(OperationDescriptor::move_in(&c.to_string(), &p.to_string()))
        }
        2 => Some(OperationDescriptor::move_out(&nested.choose(rng)?.to_string())),
        3 => {
            let c = pick(rng)?;
            let names: Vec<String> = a.component(&c)?.ports.iter().map(|p| p.name.clone()).collect();
            if names.len() < 2 {
                return None;
            }
            let k = rng.gen_range(1..names.len());
            let part: Vec<&str> = names.choose_multiple(rng, k).map(String::as_str).collect();
            Some(OperationDescriptor::new(OperationName::SplitComponent, c).with_param("ports", part))
        }
        4 => {
            let p = ports.choose(rng)?;
            let t = siblings(&comps, &p.component).choose(rng)?.clone();
            Some(OperationDescriptor::new(OperationName::MovePort, p).with_param("target", t.to_string()))
        }
        5 => {
            let c = pick(rng)?;
            let other = siblings(&comps, &c).choose(rng)?.clone();
            Some(
                OperationDescriptor::new(OperationName::MergeComponents, &c)
                    .with_param("with", vec![other.to_string()])
                    .with_param("newName", format!("M{}", rng.gen_range(0..100))),
            )
        }
        _ => {
            let inner: Vec<&PortRef> = ports.iter().filter(|p| p.component.parent().is_some()).collect();
            Some(OperationDescriptor::delegate(&inner.choose(rng)?.to_string()))
        }
    }
}

/// Transitive dependencies computed from scratch with a Warshall closure
/// over port indices.
pub fn reachability_oracle(a: &Architecture) -> BTreeSet<(PortRef, PortRef)> {
    let ports = a.port_refs();
    let index: BTreeMap<&PortRef, usize> = ports.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = ports.len();
    let mut m = vec![vec![false; n]; n];
    let mut link = |p: &PortRef, q: &PortRef| {
        if let (Some(&i), Some(&j)) = (index.get(p), index.get(q)) {
            m[i][j] = true;
        }
    };
    for u in &a.uses {
        link(&u.from, &u.to);
    }
    for k in &a.connectors {
        let attached = |d: PortDirection| -> Vec<&PortRef> {
            a.attachments
                .iter()
                .filter(|x| x.role.connector == k.name)
                .filter(|x| k.role(&x.role.role).is_some_and(|r| r.direction == d))
                .map(|x| &x.port)
                .collect()
        };
        for r in attached(PortDirection::Required) {
            for p in attached(PortDirection::Provided) {
                link(r, p);
            }
        }
    }
    for Binding { outer, inner } in &a.bindings {
        match a.port(outer).map(|p| p.direction) {
            Some(PortDirection::Provided) => link(outer, inner),
            Some(PortDirection::Required) => link(inner, outer),
            None => {}
        }
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[i][j] {
                out.insert((ports[i].clone(), ports[j].clone()));
            }
        }
    }
    out
}

/// Compares the dependencies among ports that exist before and after an
/// operation. Returns the pairs gained and lost, in output references.
pub fn reachability_diff(
    before: &Architecture,
    after: &Architecture,
    relocated: &BTreeMap<PortRef, PortRef>,
) -> (BTreeSet<(PortRef, PortRef)>, BTreeSet<(PortRef, PortRef)>) {
    let locate = |p: &PortRef| relocated.get(p).cloned().unwrap_or_else(|| p.clone());
    let present: BTreeSet<PortRef> = after.port_refs().into_iter().collect();
    let kept: BTreeSet<PortRef> = before
        .port_refs()
        .iter()
        .map(locate)
        .filter(|p| present.contains(p))
        .collect();
    let old: BTreeSet<_> = reachability_oracle(before)
        .iter()
        .map(|(p, q)| (locate(p), locate(q)))
        .filter(|(p, q)| kept.contains(p) && kept.contains(q))
        .collect();
    let new: BTreeSet<_> = reachability_oracle(after)
        .into_iter()
        .filter(|(p, q)| kept.contains(p) && kept.contains(q))
        .collect();
    let gained = new.difference(&old).cloned().collect();
    let lost = old.difference(&new).cloned().collect();
    (gained, lost)
}

use archevol_core::graph::matching::Bindings;
use archevol_core::graph::{AttrExpr, EdgeId, HostGraph, NodeId, Pattern, TypeGraph, Value};

const NAMES: [&str; 3] = ["a", "b", "c"];

/// A random graph over the concrete types of `tg` with up to `max_nodes`
/// nodes, type-correct edges and names drawn from a small pool.
pub fn random_host(rng: &mut impl Rng, tg: &TypeGraph, max_nodes: usize) -> HostGraph {
    let concrete: Vec<&str> = tg
        .node_types()
        .iter()
        .filter(|t| !t.is_abstract)
        .map(|t| t.name.as_str())
        .collect();
    let mut g = HostGraph::new();
    let n = rng.gen_range(1..=max_nodes);
    let mut nodes = Vec::new();
    for _ in 0..n {
        let ty = *concrete.choose(rng).expect("concrete types");
        let name = Value::from(*NAMES.choose(rng).expect("names"));
        nodes.push(g.add_node(ty, [("n".to_owned(), name)].into()));
    }
    let edges = rng.gen_range(0..=2 * n);
    for _ in 0..edges {
        let et = tg.edge_types().choose(rng).expect("edge types");
        let ends = |want: &str| -> Vec<NodeId> {
            nodes
                .iter()
                .copied()
                .filter(|&x| tg.is_subtype(&g.node(x).expect("node").ty, want))
                .collect()
        };
        let (srcs, tgts) = (ends(&et.source), ends(&et.target));
        if let (Some(&s), Some(&t)) = (srcs.choose(rng), tgts.choose(rng)) {
            g.add_edge(&et.name, s, t).expect("typed edge");
        }
    }
    g
}

fn unify(pattern: &std::collections::BTreeMap<String, AttrExpr>, host: &std::collections::BTreeMap<String, Value>, env: &mut Bindings) -> bool {
    for (k, e) in pattern {
        let Some(v) = host.get(k) else { return false };
        match e {
            AttrExpr::Const(c) => {
                if c != v {
                    return false;
                }
            }
            AttrExpr::Var(x) => match env.get(x) {
                Some(b) if b != v => return false,
                Some(_) => {}
                None => {
                    env.insert(x.clone(), v.clone());
                }
            },
        }
    }
    true
}

pub type BruteEmbedding = (BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>);

/// Every injective embedding of `p` into `h`, found by trying all node
/// assignments (pruned by type only) and then all edge assignments.
pub fn brute_embeddings(p: &Pattern, h: &HostGraph, tg: &TypeGraph, env: &Bindings) -> Vec<(BruteEmbedding, Bindings)> {
    let pn: Vec<NodeId> = p.node_ids().collect();
    let mut maps = Vec::new();
    node_maps(p, h, tg, &pn, &mut Vec::new(), &mut maps);
    let pes: Vec<EdgeId> = p.edge_ids().collect();
    let mut out = Vec::new();
    for assign in maps {
        let map: BTreeMap<NodeId, NodeId> = pn.iter().copied().zip(assign).collect();
        let mut env = env.clone();
        if !map
            .iter()
            .all(|(&x, &y)| unify(&p.node(x).expect("node").attrs, &h.node(y).expect("node").attrs, &mut env))
        {
            continue;
        }
        edge_maps(0, &pes, p, h, &map, &env, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn node_maps(p: &Pattern, h: &HostGraph, tg: &TypeGraph, pn: &[NodeId], assign: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
    let k = assign.len();
    if k == pn.len() {
        out.push(assign.clone());
        return;
    }
    let want = &p.node(pn[k]).expect("node").ty;
    for x in h.nodes() {
        if !assign.contains(&x.id) && tg.is_subtype(&x.ty, want) {
            assign.push(x.id);
            node_maps(p, h, tg, pn, assign, out);
            assign.pop();
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn edge_maps(
    k: usize,
    pes: &[EdgeId],
    p: &Pattern,
    h: &HostGraph,
    map: &BTreeMap<NodeId, NodeId>,
    env: &Bindings,
    chosen: &mut Vec<EdgeId>,
    out: &mut Vec<(BruteEmbedding, Bindings)>,
) {
    if k == pes.len() {
        let edges = pes.iter().copied().zip(chosen.iter().copied()).collect();
        out.push(((map.clone(), edges), env.clone()));
        return;
    }
    let e = p.edge(pes[k]).expect("edge");
    for he in h.edges() {
        if chosen.contains(&he.id) || he.ty != e.ty || he.src != map[&e.src] || he.tgt != map[&e.tgt] {
            continue;
        }
        let mut env2 = env.clone();
        if !unify(&e.attrs, &he.attrs, &mut env2) {
            continue;
        }
        chosen.push(he.id);
        edge_maps(k + 1, pes, p, h, map, &env2, chosen, out);
        chosen.pop();
    }
}

/// Brute-force counterpart of rule matching: LHS embeddings none of whose
/// NACs extends them.
pub fn brute_matches(
    lhs: &Pattern,
    nacs: &[&Pattern],
    h: &HostGraph,
    tg: &TypeGraph,
    env: &Bindings,
) -> Vec<BruteEmbedding> {
    let mut cache: BTreeMap<(usize, Bindings), Vec<(BruteEmbedding, Bindings)>> = BTreeMap::new();
    let mut out = Vec::new();
    for ((nodes, edges), env) in brute_embeddings(lhs, h, tg, env) {
        let blocked = nacs.iter().enumerate().any(|(i, nac)| {
            cache
                .entry((i, env.clone()))
                .or_insert_with(|| brute_embeddings(nac, h, tg, &env))
                .iter()
                .any(|((n2, e2), _)| {
                    nodes.iter().all(|(k, v)| n2.get(k) == Some(v)) && edges.iter().all(|(k, v)| e2.get(k) == Some(v))
                })
        });
        if !blocked {
            out.push((nodes, edges));
        }
    }
    out
}

/// Compares rule matching and constraint checking on `h` with the brute
/// force enumerations. Returns one line per disagreement.
pub fn matcher_discrepancies(h: &HostGraph, tg: &TypeGraph) -> Vec<String> {
    use archevol_core::cosa::{base_invariants, rules};
    use archevol_core::graph::{check_constraint, Clause};
    use archevol_core::rewrite::find_matches;
    use archevol_core::styles::client_server_style;

    let mut out = Vec::new();
    let env: Bindings = [(rules::NAME_PARAM.to_owned(), Value::from("a"))].into();
    for rule in rules::client_server_rules() {
        let env = if rule.params().is_empty() { Bindings::new() } else { env.clone() };
        let mut fast: Vec<BruteEmbedding> = find_matches(&rule, h, tg, &env)
            .expect("matching")
            .into_iter()
            .map(|m| (m.embedding.nodes, m.embedding.edges))
            .collect();
        fast.sort();
        let nacs: Vec<&Pattern> = rule.nacs().iter().map(|n| &n.pattern).collect();
        let mut slow = brute_matches(rule.lhs(), &nacs, h, tg, &env);
        slow.sort();
        if fast != slow {
            out.push(format!("{}: {} matches, brute force {}", rule.name(), fast.len(), slow.len()));
        }
    }
    let mut constraints = base_invariants();
    constraints.extend(client_server_style().constraints);
    for c in &constraints {
        let mut fast: Vec<BTreeSet<NodeId>> = check_constraint(h, c, tg)
            .expect("checkable")
            .violations
            .into_iter()
            .map(|v| v.nodes)
            .collect();
        fast.sort();
        let mut slow = Vec::new();
        for clause in &c.clauses {
            match clause {
                Clause::Forbidden(p) => {
                    slow.extend(
                        brute_embeddings(p, h, tg, &Bindings::new())
                            .into_iter()
                            .map(|((n, _), _)| n.into_values().collect::<BTreeSet<_>>()),
                    );
                }
                Clause::Conditional { premise, conclusions } => {
                    for ((n, e), env) in brute_embeddings(premise, h, tg, &Bindings::new()) {
                        let extends = conclusions.iter().any(|q| {
                            brute_embeddings(q, h, tg, &env).iter().any(|((n2, e2), _)| {
                                n.iter().all(|(k, v)| n2.get(k) == Some(v)) && e.iter().all(|(k, v)| e2.get(k) == Some(v))
                            })
                        });
                        if !extends {
                            slow.push(n.into_values().collect());
                        }
                    }
                }
            }
        }
        slow.sort();
        if fast != slow {
            out.push(format!("{}: {} violations, brute force {}", c.name, fast.len(), slow.len()));
        }
    }
    out
}

/// Patterns worth planting in random hosts: rule sides, NACs and
/// constraint clauses of the client-server setting.
pub fn seed_patterns() -> Vec<Pattern> {
    use archevol_core::cosa::{base_invariants, rules};
    use archevol_core::graph::Clause;
    use archevol_core::styles::client_server_style;
    let mut out = Vec::new();
    for r in rules::client_server_rules() {
        out.push(r.lhs().clone());
        out.push(r.rhs().clone());
        out.extend(r.nacs().iter().map(|n| n.pattern.clone()));
    }
    let mut cs = base_invariants();
    cs.extend(client_server_style().constraints);
    for c in cs {
        for clause in c.clauses {
            match clause {
                Clause::Forbidden(p) => out.push(p),
                Clause::Conditional { premise, conclusions } => {
                    out.push(premise);
                    out.extend(conclusions);
                }
            }
        }
    }
    out.retain(|p| p.node_count() > 0);
    out
}

/// A random host built by planting copies of `seeds` (sometimes sharing
/// nodes with what is already there) and then adding random nodes and
/// edges, up to `max_nodes` nodes.
pub fn structured_host(rng: &mut impl Rng, tg: &TypeGraph, max_nodes: usize, seeds: &[Pattern]) -> HostGraph {
    let concrete = |want: &str| -> Vec<String> {
        tg.node_types()
            .iter()
            .filter(|t| !t.is_abstract && tg.is_subtype(&t.name, want))
            .map(|t| t.name.clone())
            .collect()
    };
    let mut g = HostGraph::new();
    while rng.gen_bool(0.75) {
        let p = seeds.choose(rng).expect("seeds");
        let mut image = BTreeMap::new();
        let mut fresh = 0;
        for n in p.nodes() {
            let reuse: Vec<NodeId> = g
                .nodes()
                .filter(|h| tg.is_subtype(&h.ty, &n.ty) && !image.values().any(|v| *v == h.id))
                .map(|h| h.id)
                .collect();
            match reuse.choose(rng) {
                Some(&h) if rng.gen_bool(0.3) => {
                    image.insert(n.id, h);
                }
                _ => {
                    fresh += 1;
                    image.insert(n.id, NodeId(u32::MAX));
                }
            }
        }
        if g.node_count() + fresh > max_nodes {
            break;
        }
        for n in p.nodes() {
            if image[&n.id] != NodeId(u32::MAX) {
                continue;
            }
            let ty = concrete(&n.ty).choose(rng).expect("concrete subtype").clone();
            let name = match n.attrs.get("n") {
                Some(AttrExpr::Const(v)) => v.clone(),
                _ => Value::from(*NAMES.choose(rng).expect("names")),
            };
            image.insert(n.id, g.add_node(ty, [("n".to_owned(), name)].into()));
        }
        for e in p.edges() {
            g.add_edge(&e.ty, image[&e.src], image[&e.tgt]).expect("typed edge");
        }
    }
    let noise = random_host(rng, tg, (max_nodes - g.node_count()).max(1));
    let offset = g.next_node_id().0;
    for n in noise.nodes() {
        if g.node_count() < max_nodes {
            g.insert_node(NodeId(n.id.0 + offset), n.ty.clone(), n.attrs.clone()).expect("fresh id");
        }
    }
    let ids: Vec<NodeId> = g.node_ids().collect();
    for _ in 0..rng.gen_range(0..=ids.len()) {
        let et = tg.edge_types().choose(rng).expect("edge types");
        let pick = |want: &str, rng: &mut _| -> Option<NodeId> {
            let c: Vec<NodeId> = ids
                .iter()
                .copied()
                .filter(|&x| tg.is_subtype(&g.node(x).expect("node").ty, want))
                .collect();
            c.choose(rng).copied()
        };
        if let (Some(s), Some(t)) = (pick(&et.source, rng), pick(&et.target, rng)) {
            g.add_edge(&et.name, s, t).expect("typed edge");
        }
    }
    g
}
