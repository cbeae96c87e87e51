use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::codec::encode_indexed;
use super::metamodel::{cosa_type_graph, ty};
use super::model::{ArchError, Architecture, ComponentPath, PortDirection, PortRef};
use crate::graph::{materialize_derived, NodeId};

/// One-step port dependencies: `uses` edges, required-to-provided links
/// across connectors, and bindings (outer on inner for provided ports,
/// inner on outer for required ports).
pub fn direct_dependencies(a: &Architecture) -> BTreeSet<(PortRef, PortRef)> {
    let mut out = BTreeSet::new();
    for u in &a.uses {
        out.insert((u.from.clone(), u.to.clone()));
    }
    for k in &a.connectors {
        let ends = |d: PortDirection| -> Vec<&PortRef> {
            k.roles
                .iter()
                .filter(|r| r.direction == d)
                .filter_map(|r| a.attached_port(&super::RoleRef::new(&k.name, &r.name)))
                .collect()
        };
        for req in ends(PortDirection::Required) {
            for prov in ends(PortDirection::Provided) {
                out.insert((req.clone(), prov.clone()));
            }
        }
    }
    for b in &a.bindings {
        match a.port(&b.outer).map(|p| p.direction) {
            Some(PortDirection::Provided) => out.insert((b.outer.clone(), b.inner.clone())),
            Some(PortDirection::Required) => out.insert((b.inner.clone(), b.outer.clone())),
            None => false,
        };
    }
    out
}

/// Transitive port dependency relation: `(p, q)` when `p` depends on `q`
/// through a nonempty chain of direct dependencies, with `p != q`.
pub fn dependency_reachability(a: &Architecture) -> BTreeSet<(PortRef, PortRef)> {
    let mut succ: BTreeMap<PortRef, Vec<PortRef>> = BTreeMap::new();
    for (p, q) in direct_dependencies(a) {
        succ.entry(p).or_default().push(q);
    }
    let mut out = BTreeSet::new();
    for start in succ.keys() {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&PortRef> = succ[start].iter().collect();
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n) {
                continue;
            }
            if let Some(next) = succ.get(n) {
                queue.extend(next.iter());
            }
        }
        out.extend(seen.into_iter().filter(|q| *q != start).map(|q| (start.clone(), q.clone())));
    }
    out
}

/// Pairs whose endpoints both survive, renamed through `relocated`
/// (old reference to new reference) and restricted to `keep`.
pub fn restrict_pairs(
    pairs: &BTreeSet<(PortRef, PortRef)>,
    relocated: &BTreeMap<PortRef, PortRef>,
    keep: &BTreeSet<PortRef>,
) -> BTreeSet<(PortRef, PortRef)> {
    let map = |p: &PortRef| relocated.get(p).cloned().unwrap_or_else(|| p.clone());
    pairs
        .iter()
        .map(|(p, q)| (map(p), map(q)))
        .filter(|(p, q)| keep.contains(p) && keep.contains(q))
        .collect()
}

/// Component pairs related by the derived `connectsTo` edge type.
pub fn connects_to(a: &Architecture) -> Result<BTreeSet<(ComponentPath, ComponentPath)>, ArchError> {
    let enc = encode_indexed(a)?;
    let path_of: BTreeMap<NodeId, &ComponentPath> = enc.components.iter().map(|(p, n)| (*n, p)).collect();
    let g = materialize_derived(&enc.graph, cosa_type_graph());
    Ok(g.edges()
        .filter(|e| e.ty == ty::CONNECTS_TO)
        .filter_map(|e| Some(((*path_of.get(&e.src)?).clone(), (*path_of.get(&e.tgt)?).clone())))
        .collect())
}
