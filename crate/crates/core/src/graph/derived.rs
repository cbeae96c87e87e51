use std::collections::BTreeSet;

use super::{EdgeId, EdgeType, Graph, NodeId, PathStep, TypeGraph};
use crate::graph::types::Direction;

/// Removes every edge whose type is derived in `tg`.
pub fn strip_derived<A: Clone>(g: &Graph<A>, tg: &TypeGraph) -> Graph<A> {
    let mut out = g.clone();
    let derived: Vec<EdgeId> = g
        .edges()
        .filter(|e| tg.edge_type(&e.ty).is_some_and(EdgeType::is_derived))
        .map(|e| e.id)
        .collect();
    for id in derived {
        out.remove_edge(id).expect("present");
    }
    out
}

/// Adds one derived edge per distinct (source, target) pair connected by
/// each derived edge type's path. Existing derived edges are dropped first,
/// so the result never holds stale derived edges.
pub fn materialize_derived<A: Clone>(g: &Graph<A>, tg: &TypeGraph) -> Graph<A> {
    let mut out = strip_derived(g, tg);
    for et in tg.edge_types() {
        let Some(path) = &et.derivation else { continue };
        let mut pairs = BTreeSet::new();
        for start in out.nodes().filter(|n| tg.is_subtype(&n.ty, &et.source)) {
            let mut used = BTreeSet::new();
            walk(&out, tg, &path.steps, start.id, &mut used, &mut |end| {
                pairs.insert((start.id, end));
            });
        }
        for (s, t) in pairs {
            out.add_edge(et.name.clone(), s, t).expect("endpoints exist");
        }
    }
    out
}

fn walk<A: Clone>(
    g: &Graph<A>,
    tg: &TypeGraph,
    steps: &[PathStep],
    at: NodeId,
    used: &mut BTreeSet<EdgeId>,
    emit: &mut dyn FnMut(NodeId),
) {
    let Some((step, rest)) = steps.split_first() else {
        emit(at);
        return;
    };
    let hops: Vec<(EdgeId, NodeId)> = match step.direction {
        Direction::Forward => g.out_edges(at, &step.edge_type).map(|e| (e.id, e.tgt)).collect(),
        Direction::Backward => g.in_edges(at, &step.edge_type).map(|e| (e.id, e.src)).collect(),
    };
    for (eid, next) in hops {
        if used.contains(&eid) {
            continue;
        }
        let ty = &g.node(next).expect("endpoint").ty;
        if !tg.is_subtype(ty, &step.node_type) {
            continue;
        }
        used.insert(eid);
        walk(g, tg, rest, next, used, emit);
        used.remove(&eid);
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::{HostGraph, NodeType};

    fn tg() -> TypeGraph {
        TypeGraph::new(
            vec![NodeType::concrete("A"), NodeType::concrete("B")],
            vec![
                EdgeType::new("ab", "A", "B"),
                EdgeType::new("linked", "A", "A").derived(vec![PathStep::fwd("ab", "B"), PathStep::bwd("ab", "A")]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn trail_semantics_and_idempotence() {
        let mut g = HostGraph::new();
        let a1 = g.add_node("A", BTreeMap::new());
        let a2 = g.add_node("A", BTreeMap::new());
        let b = g.add_node("B", BTreeMap::new());
        g.add_edge("ab", a1, b).unwrap();
        let m = materialize_derived(&g, &tg());
        // a single edge cannot be walked forwards then back
        assert_eq!(m.edge_count(), 1);
        g.add_edge("ab", a2, b).unwrap();
        let m = materialize_derived(&g, &tg());
        assert_eq!(m.edges().filter(|e| e.ty == "linked").count(), 2);
        assert_eq!(materialize_derived(&m, &tg()), m);
        assert_eq!(strip_derived(&m, &tg()), g);
    }
}
