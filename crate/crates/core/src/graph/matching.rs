//! Injective pattern matching (backtracking, VF2-style candidate pruning).
//!
//! A pattern node matches a host node whose type is a (reflexive) subtype of
//! the pattern node's type; edges match by exact edge type. Distinct pattern
//! elements always map to distinct host elements.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use super::{AttrExpr, EdgeId, Graph, HostAttr, NodeId, Pattern, TypeGraph, Value};

/// Valuation of attribute variables.
pub type Bindings = BTreeMap<String, Value>;

/// Pattern-to-host element map.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    pub nodes: BTreeMap<NodeId, NodeId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

impl Embedding {
    pub fn node(&self, id: NodeId) -> Option<NodeId> {
        self.nodes.get(&id).copied()
    }

    pub fn edge(&self, id: EdgeId) -> Option<EdgeId> {
        self.edges.get(&id).copied()
    }

    /// Canonical ordering key: host images in pattern-id order.
    pub fn sort_key(&self) -> (Vec<NodeId>, Vec<EdgeId>) {
        (
            self.nodes.values().copied().collect(),
            self.edges.values().copied().collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrMode {
    /// Constants must equal and variables bind consistently.
    Check,
    /// Attributes are not consulted (structural matching).
    Ignore,
}

fn unify<H: HostAttr>(expr: &AttrExpr, host: Option<&H>, env: &mut Bindings) -> bool {
    let Some(host) = host else {
        return false;
    };
    let Some(val) = host.known() else {
        // an unknown host value (pattern used as host) unifies with anything
        return true;
    };
    match expr {
        AttrExpr::Const(c) => c == val,
        AttrExpr::Var(x) => match env.get(x) {
            Some(bound) => bound == val,
            None => {
                env.insert(x.clone(), val.clone());
                true
            }
        },
    }
}

fn unify_all<H: HostAttr>(
    pattern: &BTreeMap<String, AttrExpr>,
    host: &BTreeMap<String, H>,
    env: &mut Bindings,
) -> bool {
    pattern.iter().all(|(k, e)| unify(e, host.get(k), env))
}

struct Search<'a, H> {
    pattern: &'a Pattern,
    host: &'a Graph<H>,
    tg: &'a TypeGraph,
    mode: AttrMode,
    order: Vec<NodeId>,
    pattern_edges: Vec<EdgeId>,
    // host adjacency by (node) → edges, for candidate generation
    out_adj: BTreeMap<NodeId, Vec<EdgeId>>,
    in_adj: BTreeMap<NodeId, Vec<EdgeId>>,
}

impl<'a, H: HostAttr> Search<'a, H> {
    fn new(pattern: &'a Pattern, host: &'a Graph<H>, tg: &'a TypeGraph, mode: AttrMode, seed: &Embedding) -> Self {
        let mut out_adj: BTreeMap<NodeId, Vec<EdgeId>> = BTreeMap::new();
        let mut in_adj: BTreeMap<NodeId, Vec<EdgeId>> = BTreeMap::new();
        for e in host.edges() {
            out_adj.entry(e.src).or_default().push(e.id);
            in_adj.entry(e.tgt).or_default().push(e.id);
        }

        // Order free pattern nodes so each one is adjacent to as many earlier
        // (or seeded) nodes as possible.
        let mut placed: BTreeSet<NodeId> = seed.nodes.keys().copied().collect();
        let mut remaining: Vec<NodeId> = pattern
            .node_ids()
            .filter(|n| !seed.nodes.contains_key(n))
            .collect();
        let mut order = Vec::new();
        while !remaining.is_empty() {
            let score = |n: NodeId| {
                pattern
                    .edges()
                    .filter(|e| {
                        (e.src == n && placed.contains(&e.tgt)) || (e.tgt == n && placed.contains(&e.src))
                    })
                    .count()
            };
            let (idx, _) = remaining
                .iter()
                .enumerate()
                .max_by_key(|(i, n)| (score(**n), std::cmp::Reverse(*i)))
                .expect("nonempty");
            let n = remaining.remove(idx);
            placed.insert(n);
            order.push(n);
        }
        let pattern_edges = pattern
            .edge_ids()
            .filter(|e| !seed.edges.contains_key(e))
            .collect();
        Search {
            pattern,
            host,
            tg,
            mode,
            order,
            pattern_edges,
            out_adj,
            in_adj,
        }
    }

    fn node_ok(&self, pn: NodeId, hn: NodeId, env: &mut Bindings) -> bool {
        let p = self.pattern.node(pn).expect("pattern node");
        let Some(h) = self.host.node(hn) else {
            return false;
        };
        if !self.tg.is_subtype(&h.ty, &p.ty) {
            return false;
        }
        self.mode == AttrMode::Ignore || unify_all(&p.attrs, &h.attrs, env)
    }

    /// Every pattern edge between `pn` and already-mapped nodes must have at
    /// least one host counterpart.
    fn edges_feasible(&self, pn: NodeId, hn: NodeId, emb: &Embedding) -> bool {
        self.pattern.edges().all(|pe| {
            let (s, t) = match (pe.src == pn, pe.tgt == pn) {
                (true, true) => (hn, hn),
                (true, false) => match emb.node(pe.tgt) {
                    Some(t) => (hn, t),
                    None => return true,
                },
                (false, true) => match emb.node(pe.src) {
                    Some(s) => (s, hn),
                    None => return true,
                },
                (false, false) => return true,
            };
            self.out_adj.get(&s).is_some_and(|es| {
                es.iter().any(|&he| {
                    let h = self.host.edge(he).expect("host edge");
                    h.tgt == t && h.ty == pe.ty
                })
            })
        })
    }

    fn candidates(&self, pn: NodeId, emb: &Embedding) -> Vec<NodeId> {
        for pe in self.pattern.edges() {
            if pe.src == pn && pe.tgt != pn {
                if let Some(t) = emb.node(pe.tgt) {
                    let mut c: Vec<NodeId> = self
                        .in_adj
                        .get(&t)
                        .into_iter()
                        .flatten()
                        .map(|&he| self.host.edge(he).expect("edge"))
                        .filter(|he| he.ty == pe.ty)
                        .map(|he| he.src)
                        .collect();
                    c.sort();
                    c.dedup();
                    return c;
                }
            }
            if pe.tgt == pn && pe.src != pn {
                if let Some(s) = emb.node(pe.src) {
                    let mut c: Vec<NodeId> = self
                        .out_adj
                        .get(&s)
                        .into_iter()
                        .flatten()
                        .map(|&he| self.host.edge(he).expect("edge"))
                        .filter(|he| he.ty == pe.ty)
                        .map(|he| he.tgt)
                        .collect();
                    c.sort();
                    c.dedup();
                    return c;
                }
            }
        }
        self.host.node_ids().collect()
    }

    fn nodes(
        &self,
        depth: usize,
        emb: &mut Embedding,
        used_nodes: &mut BTreeSet<NodeId>,
        used_edges: &mut BTreeSet<EdgeId>,
        env: &mut Bindings,
        visit: &mut dyn FnMut(&Embedding, &Bindings) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == self.order.len() {
            return self.edges(0, emb, used_edges, env, visit);
        }
        let pn = self.order[depth];
        for hn in self.candidates(pn, emb) {
            if used_nodes.contains(&hn) {
                continue;
            }
            let mut env2 = env.clone();
            if !self.node_ok(pn, hn, &mut env2) || !self.edges_feasible(pn, hn, emb) {
                continue;
            }
            emb.nodes.insert(pn, hn);
            used_nodes.insert(hn);
            let flow = self.nodes(depth + 1, emb, used_nodes, used_edges, &mut env2, visit);
            used_nodes.remove(&hn);
            emb.nodes.remove(&pn);
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn edges(
        &self,
        idx: usize,
        emb: &mut Embedding,
        used: &mut BTreeSet<EdgeId>,
        env: &mut Bindings,
        visit: &mut dyn FnMut(&Embedding, &Bindings) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if idx == self.pattern_edges.len() {
            return visit(emb, env);
        }
        let pe = self.pattern.edge(self.pattern_edges[idx]).expect("pattern edge");
        let s = emb.node(pe.src).expect("mapped");
        let t = emb.node(pe.tgt).expect("mapped");
        let cands: Vec<EdgeId> = self.out_adj.get(&s).cloned().unwrap_or_default();
        for he in cands {
            let h = self.host.edge(he).expect("host edge");
            if h.tgt != t || h.ty != pe.ty || used.contains(&he) {
                continue;
            }
            let mut env2 = env.clone();
            if self.mode == AttrMode::Check && !unify_all(&pe.attrs, &h.attrs, &mut env2) {
                continue;
            }
            emb.edges.insert(pe.id, he);
            used.insert(he);
            let flow = self.edges(idx + 1, emb, used, &mut env2, visit);
            used.remove(&he);
            emb.edges.remove(&pe.id);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits every injective embedding of `pattern` into `host` that extends
/// `seed`. Seeded elements are re-validated against the pattern (a pattern
/// may refine the type of a seeded node).
pub fn for_each_embedding<H: HostAttr>(
    pattern: &Pattern,
    host: &Graph<H>,
    tg: &TypeGraph,
    seed: &Embedding,
    env: &Bindings,
    mode: AttrMode,
    mut visit: impl FnMut(&Embedding, &Bindings) -> ControlFlow<()>,
) {
    let search = Search::new(pattern, host, tg, mode, seed);
    let mut env = env.clone();
    let mut emb = Embedding::default();
    let mut used_nodes = BTreeSet::new();
    let mut used_edges = BTreeSet::new();
    for (&pn, &hn) in &seed.nodes {
        if pattern.contains_node(pn) {
            if !search.node_ok(pn, hn, &mut env) {
                return;
            }
            emb.nodes.insert(pn, hn);
        }
        if !used_nodes.insert(hn) {
            return;
        }
    }
    for (&pe, &he) in &seed.edges {
        if let Some(p) = pattern.edge(pe) {
            let Some(h) = host.edge(he) else { return };
            let ends_ok = emb.node(p.src) == Some(h.src) && emb.node(p.tgt) == Some(h.tgt);
            if h.ty != p.ty || !ends_ok {
                return;
            }
            if mode == AttrMode::Check && !unify_all(&p.attrs, &h.attrs, &mut env) {
                return;
            }
            emb.edges.insert(pe, he);
        }
        if !used_edges.insert(he) {
            return;
        }
    }
    let _ = search.nodes(0, &mut emb, &mut used_nodes, &mut used_edges, &mut env, &mut visit);
}

/// All embeddings extending `seed`, in canonical order.
pub fn embeddings<H: HostAttr>(
    pattern: &Pattern,
    host: &Graph<H>,
    tg: &TypeGraph,
    seed: &Embedding,
    env: &Bindings,
    mode: AttrMode,
) -> Vec<(Embedding, Bindings)> {
    let mut out = Vec::new();
    for_each_embedding(pattern, host, tg, seed, env, mode, |e, b| {
        out.push((e.clone(), b.clone()));
        ControlFlow::Continue(())
    });
    out.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
    out
}

/// Whether at least one embedding extending `seed` exists.
pub fn has_embedding<H: HostAttr>(
    pattern: &Pattern,
    host: &Graph<H>,
    tg: &TypeGraph,
    seed: &Embedding,
    env: &Bindings,
    mode: AttrMode,
) -> bool {
    let mut found = false;
    for_each_embedding(pattern, host, tg, seed, env, mode, |_, _| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{attrs, AttrKind, EdgeType, HostGraph, NodeType};

    fn tg() -> TypeGraph {
        TypeGraph::new(
            vec![
                NodeType::concrete("C").with_attr("n", AttrKind::String),
                NodeType::concrete("S").with_supertype("C"),
            ],
            vec![EdgeType::new("e", "C", "C")],
        )
        .unwrap()
    }

    fn host() -> HostGraph {
        let mut g = HostGraph::new();
        let a = g.add_node("C", attrs([("n", "a".into())]));
        let b = g.add_node("S", attrs([("n", "b".into())]));
        let c = g.add_node("C", attrs([("n", "c".into())]));
        g.add_edge("e", a, b).unwrap();
        g.add_edge("e", b, c).unwrap();
        g.add_edge("e", a, b).unwrap();
        g
    }

    #[test]
    fn single_node_matches_subtypes() {
        let mut p = Pattern::new();
        p.add_node("C", BTreeMap::new());
        let all = embeddings(&p, &host(), &tg(), &Embedding::default(), &Bindings::new(), AttrMode::Check);
        assert_eq!(all.len(), 3);
        let mut p = Pattern::new();
        p.add_node("S", BTreeMap::new());
        let all = embeddings(&p, &host(), &tg(), &Embedding::default(), &Bindings::new(), AttrMode::Check);
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn parallel_edges_give_distinct_matches() {
        let mut p = Pattern::new();
        let x = p.add_node("C", BTreeMap::new());
        let y = p.add_node("C", BTreeMap::new());
        p.add_edge("e", x, y).unwrap();
        let all = embeddings(&p, &host(), &tg(), &Embedding::default(), &Bindings::new(), AttrMode::Check);
        // a->b twice, b->c once
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn variables_bind_and_constrain() {
        let mut p = Pattern::new();
        p.add_node("C", attrs([("n", AttrExpr::var("x"))]));
        let mut env = Bindings::new();
        env.insert("x".into(), "c".into());
        let all = embeddings(&p, &host(), &tg(), &Embedding::default(), &env, AttrMode::Check);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].0.node(NodeId(0)), Some(NodeId(2)));
    }

    #[test]
    fn seeds_are_revalidated() {
        let mut p = Pattern::new();
        let x = p.add_node("S", BTreeMap::new());
        let mut seed = Embedding::default();
        seed.nodes.insert(x, NodeId(0));
        assert!(!has_embedding(&p, &host(), &tg(), &seed, &Bindings::new(), AttrMode::Check));
        seed.nodes.insert(x, NodeId(1));
        assert!(has_embedding(&p, &host(), &tg(), &seed, &Bindings::new(), AttrMode::Check));
    }
}
