use std::collections::{BTreeMap, BTreeSet};

use crate::graph::matching::Embedding;
use crate::graph::{AttrExpr, EdgeId, NodeId, Pattern, TypeGraph};

/// A jointly surjective pair of injective morphisms `a: A -> graph` and
/// `b: B -> graph`. `a` is the identity on A's ids.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub graph: Pattern,
    pub a: Embedding,
    pub b: Embedding,
}

impl Overlap {
    /// Elements of `graph` in the image of both morphisms.
    pub fn shared_nodes(&self) -> BTreeSet<NodeId> {
        let a: BTreeSet<NodeId> = self.a.nodes.values().copied().collect();
        self.b.nodes.values().copied().filter(|n| a.contains(n)).collect()
    }

    pub fn shared_edges(&self) -> BTreeSet<EdgeId> {
        let a: BTreeSet<EdgeId> = self.a.edges.values().copied().collect();
        self.b.edges.values().copied().filter(|e| a.contains(e)).collect()
    }
}

struct Enum<'a> {
    a: &'a Pattern,
    b: &'a Pattern,
    tg: &'a TypeGraph,
    b_nodes: Vec<NodeId>,
    b_edges: Vec<EdgeId>,
}

/// Enumerates every overlap of `a` and `b`: each B node is identified with
/// at most one type-compatible A node, and each B edge whose endpoints are
/// both identified may be identified with a parallel A edge of its type.
pub fn for_each_overlap(a: &Pattern, b: &Pattern, tg: &TypeGraph, visit: &mut dyn FnMut(Overlap)) {
    let e = Enum {
        a,
        b,
        tg,
        b_nodes: b.node_ids().collect(),
        b_edges: b.edge_ids().collect(),
    };
    let mut nodes = BTreeMap::new();
    let mut used = BTreeSet::new();
    e.nodes(0, &mut nodes, &mut used, visit);
}

impl Enum<'_> {
    fn nodes(
        &self,
        i: usize,
        map: &mut BTreeMap<NodeId, NodeId>,
        used: &mut BTreeSet<NodeId>,
        visit: &mut dyn FnMut(Overlap),
    ) {
        let Some(&bn) = self.b_nodes.get(i) else {
            let mut edges = BTreeMap::new();
            let mut used_edges = BTreeSet::new();
            self.edges(0, map, &mut edges, &mut used_edges, visit);
            return;
        };
        self.nodes(i + 1, map, used, visit);
        let bt = &self.b.node(bn).expect("b node").ty;
        for an in self.a.nodes() {
            if used.contains(&an.id) || self.tg.meet(&an.ty, bt).is_none() {
                continue;
            }
            used.insert(an.id);
            map.insert(bn, an.id);
            self.nodes(i + 1, map, used, visit);
            map.remove(&bn);
            used.remove(&an.id);
        }
    }

    fn edges(
        &self,
        i: usize,
        nodes: &BTreeMap<NodeId, NodeId>,
        map: &mut BTreeMap<EdgeId, EdgeId>,
        used: &mut BTreeSet<EdgeId>,
        visit: &mut dyn FnMut(Overlap),
    ) {
        let Some(&be) = self.b_edges.get(i) else {
            visit(self.build(nodes, map));
            return;
        };
        self.edges(i + 1, nodes, map, used, visit);
        let e = self.b.edge(be).expect("b edge");
        let (Some(&s), Some(&t)) = (nodes.get(&e.src), nodes.get(&e.tgt)) else {
            return;
        };
        for ae in self.a.edges() {
            if ae.ty != e.ty || ae.src != s || ae.tgt != t || used.contains(&ae.id) {
                continue;
            }
            used.insert(ae.id);
            map.insert(be, ae.id);
            self.edges(i + 1, nodes, map, used, visit);
            map.remove(&be);
            used.remove(&ae.id);
        }
    }

    fn build(&self, nodes: &BTreeMap<NodeId, NodeId>, edges: &BTreeMap<EdgeId, EdgeId>) -> Overlap {
        let mut g = self.a.clone();
        let mut b = Embedding::default();
        for bn in &self.b_nodes {
            let n = self.b.node(*bn).expect("b node");
            let target = match nodes.get(bn) {
                Some(&an) => {
                    let node = g.node_mut(an).expect("a node");
                    node.ty = self.tg.meet(&node.ty, &n.ty).expect("compatible").to_owned();
                    for (k, v) in &n.attrs {
                        merge_attr(&mut node.attrs, k, v);
                    }
                    an
                }
                None => g.add_node(n.ty.clone(), n.attrs.clone()),
            };
            b.nodes.insert(*bn, target);
        }
        for be in &self.b_edges {
            let e = self.b.edge(*be).expect("b edge");
            let target = match edges.get(be) {
                Some(&ae) => ae,
                None => {
                    let id = g.next_edge_id();
                    g.insert_edge(id, e.ty.clone(), b.nodes[&e.src], b.nodes[&e.tgt], e.attrs.clone())
                        .expect("endpoints mapped")
                }
            };
            b.edges.insert(*be, target);
        }
        let a = Embedding {
            nodes: self.a.node_ids().map(|n| (n, n)).collect(),
            edges: self.a.edge_ids().map(|e| (e, e)).collect(),
        };
        Overlap { graph: g, a, b }
    }
}

/// Constants win over variables when two attribute terms are identified.
fn merge_attr(attrs: &mut BTreeMap<String, AttrExpr>, k: &str, v: &AttrExpr) {
    match (attrs.get(k), v) {
        (None, _) | (Some(AttrExpr::Var(_)), AttrExpr::Const(_)) => {
            attrs.insert(k.to_owned(), v.clone());
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeType;

    #[test]
    fn counts_partial_injections() {
        let tg = TypeGraph::new(vec![NodeType::concrete("T")], vec![]).unwrap();
        let mut a = Pattern::new();
        a.add_node("T", BTreeMap::new());
        a.add_node("T", BTreeMap::new());
        let b = a.clone();
        let mut n = 0;
        for_each_overlap(&a, &b, &tg, &mut |_| n += 1);
        // partial injections from a 2-set to a 2-set: 1 + 4 + 2
        assert_eq!(n, 7);
    }
}
