use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::overlap::{for_each_overlap, Overlap};
use crate::graph::matching::{embeddings, has_embedding, AttrMode, Bindings, Embedding};
use crate::graph::{
    materialize_derived, AttrExpr, EdgeId, GraphConstraint, HostGraph, NodeId, Pattern, TypeGraph, Value,
};
use crate::rewrite::{rewrite, Application, Rule};

/// Default ceiling on the node count of an overlap.
pub const DEFAULT_MAX_OVERLAP_NODES: usize = 14;

pub const CPA_FORMAT: &str = "archevol/cpa@1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConflictKind {
    DeleteUse,
    ProduceForbid,
    ProduceUse,
    DeleteForbid,
}

impl ConflictKind {
    /// Parallel conflicts disable the second rule; the other two kinds are
    /// sequential dependencies.
    pub fn is_conflict(self) -> bool {
        matches!(self, ConflictKind::DeleteUse | ConflictKind::ProduceForbid)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConflictKind::DeleteUse => "delete-use",
            ConflictKind::ProduceForbid => "produce-forbid",
            ConflictKind::ProduceUse => "produce-use",
            ConflictKind::DeleteForbid => "delete-forbid",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            ConflictKind::DeleteUse => "DU",
            ConflictKind::ProduceForbid => "PF",
            ConflictKind::ProduceUse => "PU",
            ConflictKind::DeleteForbid => "DF",
        }
    }
}

impl fmt::Display for ConflictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A minimal situation exhibiting a conflict or dependency.
///
/// `before` is the host both rules see (or the first rule sees, for
/// dependencies), `first` the first rule's match in it and `after` the result
/// of applying the first rule there. `second` is the second rule's match: in
/// `before` for conflicts and delete-forbid, in `after` for produce-use.
#[derive(Debug, Clone)]
pub struct CriticalPair {
    pub kind: ConflictKind,
    /// The NAC involved, for produce-forbid and delete-forbid.
    pub nac: Option<String>,
    pub overlap: Pattern,
    pub before: HostGraph,
    pub after: HostGraph,
    pub first: Embedding,
    pub second: Embedding,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CpaError {
    #[error("overlaps of `{first}` and `{second}` may reach {nodes} nodes, above the ceiling of {limit}")]
    OverlapCeiling {
        first: String,
        second: String,
        nodes: usize,
        limit: usize,
    },
}

/// Context for the analysis. Candidate situations violating an upper
/// multiplicity, a node-count bound or a forbidden pattern are discarded.
#[derive(Debug, Clone)]
pub struct CpaOptions {
    pub type_graph: TypeGraph,
    pub constraints: Vec<GraphConstraint>,
    pub max_overlap_nodes: usize,
}

impl CpaOptions {
    pub fn new(type_graph: TypeGraph) -> Self {
        CpaOptions {
            type_graph,
            constraints: Vec::new(),
            max_overlap_nodes: DEFAULT_MAX_OVERLAP_NODES,
        }
    }

    pub fn with_constraints(mut self, constraints: Vec<GraphConstraint>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_max_overlap_nodes(mut self, n: usize) -> Self {
        self.max_overlap_nodes = n;
        self
    }
}

/// Parallel conflicts: situations where applying `r1` disables a match of `r2`.
pub fn critical_pairs(r1: &Rule, r2: &Rule, opts: &CpaOptions) -> Result<Vec<CriticalPair>, CpaError> {
    let cx = Cx::new(r1, r2, opts);
    let mut out = cx.delete_use()?;
    out.extend(cx.produce_forbid()?);
    Ok(out)
}

/// Sequential dependencies: situations where applying `r1` enables a match
/// of `r2` that did not exist before.
pub fn sequential_dependencies(r1: &Rule, r2: &Rule, opts: &CpaOptions) -> Result<Vec<CriticalPair>, CpaError> {
    let cx = Cx::new(r1, r2, opts);
    let mut out = cx.produce_use()?;
    out.extend(cx.delete_forbid()?);
    Ok(out)
}

struct Cx<'a> {
    r1: &'a Rule,
    r2: &'a Rule,
    opts: &'a CpaOptions,
    tg: &'a TypeGraph,
    env1: Bindings,
    env2: Bindings,
}

/// Placeholder values for rule parameters.
fn param_env(rule: &Rule) -> Bindings {
    rule.params()
        .iter()
        .map(|(p, kind)| {
            let v = match kind {
                crate::graph::AttrKind::String => Value::Str(format!("<{p}>")),
                crate::graph::AttrKind::Integer => Value::Int(0),
            };
            (p.clone(), v)
        })
        .collect()
}

/// Instantiates a pattern: constants keep their value, variables become a
/// value unique to the node.
fn concrete(p: &Pattern) -> HostGraph {
    let mut g = HostGraph::new();
    for n in p.nodes() {
        g.insert_node(n.id, n.ty.clone(), host_attrs(n.id, &n.attrs))
            .expect("fresh id");
    }
    for e in p.edges() {
        let attrs = e
            .attrs
            .iter()
            .map(|(k, v)| (k.clone(), v.as_const().cloned().unwrap_or_else(|| Value::Str(format!("{k}:{}", e.id)))))
            .collect();
        g.insert_edge(e.id, e.ty.clone(), e.src, e.tgt, attrs).expect("endpoints exist");
    }
    g
}

fn host_attrs(id: NodeId, attrs: &BTreeMap<String, AttrExpr>) -> BTreeMap<String, Value> {
    attrs
        .iter()
        .map(|(k, v)| (k.clone(), v.as_const().cloned().unwrap_or_else(|| Value::Str(format!("{k}:{id}")))))
        .collect()
}

impl<'a> Cx<'a> {
    fn new(r1: &'a Rule, r2: &'a Rule, opts: &'a CpaOptions) -> Self {
        Cx {
            r1,
            r2,
            opts,
            tg: &opts.type_graph,
            env1: param_env(r1),
            env2: param_env(r2),
        }
    }

    fn ceiling(&self, a: &Pattern, b: &Pattern) -> Result<(), CpaError> {
        let nodes = a.node_count() + b.node_count();
        if nodes > self.opts.max_overlap_nodes {
            return Err(CpaError::OverlapCeiling {
                first: self.r1.name().to_owned(),
                second: self.r2.name().to_owned(),
                nodes,
                limit: self.opts.max_overlap_nodes,
            });
        }
        Ok(())
    }

    /// Upper bounds of the type graph plus forbidden patterns.
    fn consistent(&self, g: &HostGraph) -> bool {
        for nt in self.tg.node_types() {
            if nt.count.max.is_some() {
                let k = g.nodes().filter(|n| self.tg.is_subtype(&n.ty, &nt.name)).count();
                if nt.count.exceeds_max(k) {
                    return false;
                }
            }
        }
        for et in self.tg.edge_types().iter().filter(|et| !et.is_derived()) {
            if et.target_mult.max.is_some() {
                let mut out: BTreeMap<NodeId, usize> = BTreeMap::new();
                for e in g.edges().filter(|e| e.ty == et.name) {
                    *out.entry(e.src).or_default() += 1;
                }
                if out.values().any(|&k| et.target_mult.exceeds_max(k)) {
                    return false;
                }
            }
            if et.source_mult.max.is_some() {
                let mut inc: BTreeMap<NodeId, usize> = BTreeMap::new();
                for e in g.edges().filter(|e| e.ty == et.name) {
                    *inc.entry(e.tgt).or_default() += 1;
                }
                if inc.values().any(|&k| et.source_mult.exceeds_max(k)) {
                    return false;
                }
            }
        }
        let forbidden: Vec<&Pattern> = self.opts.constraints.iter().flat_map(|c| c.forbidden_patterns()).collect();
        if forbidden.is_empty() {
            return true;
        }
        let full = materialize_derived(g, self.tg);
        !forbidden
            .iter()
            .any(|p| has_embedding(p, &full, self.tg, &Embedding::default(), &Bindings::new(), AttrMode::Check))
    }

    /// Re-validates a complete embedding and its NACs; returns the bindings.
    fn valid(&self, rule: &Rule, g: &HostGraph, m: &Embedding, env: &Bindings) -> Option<Bindings> {
        let (emb, env) = embeddings(rule.lhs(), g, self.tg, m, env, AttrMode::Check).into_iter().next()?;
        if rule.nac_violated(g, self.tg, &emb, &env).is_some() {
            return None;
        }
        Some(env)
    }

    /// Applies `r1` at a valid match, honouring the gluing condition.
    fn apply_first(&self, g: &HostGraph, m: &Embedding) -> Option<Application> {
        let env = self.valid(self.r1, g, m, &self.env1)?;
        let app = rewrite(self.r1, g, m, &env).ok()?;
        self.consistent(&app.graph).then_some(app)
    }

    fn pair(&self, kind: ConflictKind, nac: Option<&str>, o: &Overlap, before: HostGraph, after: HostGraph, first: Embedding, second: Embedding) -> CriticalPair {
        CriticalPair {
            kind,
            nac: nac.map(str::to_owned),
            overlap: o.graph.clone(),
            before,
            after,
            first,
            second,
        }
    }

    fn images_of_deleted(&self, o: &Overlap) -> (BTreeSet<NodeId>, BTreeSet<EdgeId>) {
        (
            self.r1.deleted_nodes().map(|n| o.a.nodes[&n]).collect(),
            self.r1.deleted_edges().map(|e| o.a.edges[&e]).collect(),
        )
    }

    fn images_of_created(&self, o: &Overlap) -> (BTreeSet<NodeId>, BTreeSet<EdgeId>) {
        (
            self.r1.created_nodes().map(|n| o.a.nodes[&n]).collect(),
            self.r1.created_edges().map(|e| o.a.edges[&e]).collect(),
        )
    }

    fn delete_use(&self) -> Result<Vec<CriticalPair>, CpaError> {
        let mut out = Vec::new();
        if !self.r1.is_deleting() {
            return Ok(out);
        }
        let (l1, l2) = (self.r1.lhs(), self.r2.lhs());
        self.ceiling(l1, l2)?;
        let same_rule = self.r1.name() == self.r2.name();
        for_each_overlap(l1, l2, self.tg, &mut |o| {
            let (dn, de) = self.images_of_deleted(&o);
            let hit = o.b.nodes.values().any(|n| dn.contains(n)) || o.b.edges.values().any(|e| de.contains(e));
            if !hit {
                return;
            }
            if same_rule && o.a == o.b {
                return;
            }
            let g = concrete(&o.graph);
            if !self.consistent(&g) || self.valid(self.r2, &g, &o.b, &self.env2).is_none() {
                return;
            }
            let Some(app) = self.apply_first(&g, &o.a) else { return };
            out.push(self.pair(ConflictKind::DeleteUse, None, &o, g, app.graph, o.a.clone(), o.b.clone()));
        });
        Ok(out)
    }

    fn produce_forbid(&self) -> Result<Vec<CriticalPair>, CpaError> {
        let mut out = Vec::new();
        let r1_rhs = self.r1.rhs();
        for nac in self.r2.nacs() {
            self.ceiling(r1_rhs, &nac.pattern)?;
            let l2 = self.r2.lhs();
            for_each_overlap(r1_rhs, &nac.pattern, self.tg, &mut |o| {
                let (cn, ce) = self.images_of_created(&o);
                if !touches_outside(&o, l2, &cn, &ce) || touches_inside(&o, l2, &cn, &ce) {
                    return;
                }
                let Some((g, m1)) = self.invert(&o) else { return };
                let m2 = restrict(&o.b, l2);
                if !self.consistent(&g) || self.valid(self.r2, &g, &m2, &self.env2).is_none() {
                    return;
                }
                let Some(app) = self.apply_first(&g, &m1) else { return };
                let survives = m2.nodes.values().all(|n| app.graph.contains_node(*n))
                    && m2.edges.values().all(|e| app.graph.contains_edge(*e));
                if !survives
                    || !has_embedding(&nac.pattern, &app.graph, self.tg, &m2, &self.env2, AttrMode::Check)
                {
                    return;
                }
                out.push(self.pair(ConflictKind::ProduceForbid, Some(&nac.name), &o, g, app.graph, m1, m2));
            });
        }
        Ok(out)
    }

    fn produce_use(&self) -> Result<Vec<CriticalPair>, CpaError> {
        let mut out = Vec::new();
        let (r1_rhs, l2) = (self.r1.rhs(), self.r2.lhs());
        self.ceiling(r1_rhs, l2)?;
        for_each_overlap(r1_rhs, l2, self.tg, &mut |o| {
            let (cn, ce) = self.images_of_created(&o);
            if !touches_outside(&o, &Pattern::new(), &cn, &ce) {
                return;
            }
            let Some((g, m1)) = self.invert(&o) else { return };
            if !self.consistent(&g) {
                return;
            }
            let Some(app) = self.apply_first(&g, &m1) else { return };
            // created overlap elements land on fresh host ids
            let node_in_h: BTreeMap<NodeId, NodeId> = self
                .r1
                .created_nodes()
                .map(|n| (o.a.nodes[&n], app.created_nodes[&n]))
                .collect();
            let edge_in_h: BTreeMap<EdgeId, EdgeId> = self
                .r1
                .created_edges()
                .map(|e| (o.a.edges[&e], app.created_edges[&e]))
                .collect();
            let m2 = Embedding {
                nodes: o.b.nodes.iter().map(|(k, v)| (*k, *node_in_h.get(v).unwrap_or(v))).collect(),
                edges: o.b.edges.iter().map(|(k, v)| (*k, *edge_in_h.get(v).unwrap_or(v))).collect(),
            };
            if self.valid(self.r2, &app.graph, &m2, &self.env2).is_none() {
                return;
            }
            out.push(self.pair(ConflictKind::ProduceUse, None, &o, g, app.graph, m1, m2));
        });
        Ok(out)
    }

    fn delete_forbid(&self) -> Result<Vec<CriticalPair>, CpaError> {
        let mut out = Vec::new();
        if !self.r1.is_deleting() {
            return Ok(out);
        }
        let l1 = self.r1.lhs();
        let l2 = self.r2.lhs();
        for nac in self.r2.nacs() {
            self.ceiling(l1, &nac.pattern)?;
            for_each_overlap(l1, &nac.pattern, self.tg, &mut |o| {
                let (dn, de) = self.images_of_deleted(&o);
                if !touches_outside(&o, l2, &dn, &de) || touches_inside(&o, l2, &dn, &de) {
                    return;
                }
                let g = concrete(&o.graph);
                if !self.consistent(&g) {
                    return;
                }
                let m2 = restrict(&o.b, l2);
                let Some(app) = self.apply_first(&g, &o.a) else { return };
                if self.valid(self.r2, &app.graph, &m2, &self.env2).is_none() {
                    return;
                }
                out.push(self.pair(ConflictKind::DeleteForbid, Some(&nac.name), &o, g, app.graph, o.a.clone(), m2));
            });
        }
        Ok(out)
    }

    /// Reconstructs the host before `r1` from an overlap containing its RHS:
    /// drops created elements and re-adds deleted ones. Fails when another
    /// edge hangs off a created node.
    fn invert(&self, o: &Overlap) -> Option<(HostGraph, Embedding)> {
        let (cn, ce) = self.images_of_created(o);
        let dangling = o
            .graph
            .edges()
            .any(|e| !ce.contains(&e.id) && (cn.contains(&e.src) || cn.contains(&e.tgt)));
        if dangling {
            return None;
        }
        let mut g = concrete(&o.graph);
        for e in &ce {
            g.remove_edge(*e).expect("present");
        }
        for n in &cn {
            g.remove_node(*n).expect("no incident edges");
        }
        let lhs = self.r1.lhs();
        let mut m1 = Embedding::default();
        for n in lhs.nodes() {
            let id = if self.r1.is_preserved_node(n.id) {
                o.a.nodes[&n.id]
            } else {
                let id = g.next_node_id();
                g.insert_node(id, n.ty.clone(), host_attrs(id, &n.attrs)).expect("fresh id");
                id
            };
            m1.nodes.insert(n.id, id);
        }
        for e in lhs.edges() {
            let id = if self.r1.is_preserved_edge(e.id) {
                o.a.edges[&e.id]
            } else {
                let attrs = e
                    .attrs
                    .iter()
                    .map(|(k, v)| (k.clone(), v.as_const().cloned().unwrap_or_else(|| Value::Str(k.clone()))))
                    .collect();
                let id = g.next_edge_id();
                g.insert_edge(id, e.ty.clone(), m1.nodes[&e.src], m1.nodes[&e.tgt], attrs)
                    .expect("endpoints exist")
            };
            m1.edges.insert(e.id, id);
        }
        Some((g, m1))
    }
}

/// Whether some element of B outside `inner` lands on a marked element.
fn touches_outside(o: &Overlap, inner: &Pattern, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> bool {
    o.b.nodes.iter().any(|(k, v)| !inner.contains_node(*k) && nodes.contains(v))
        || o.b.edges.iter().any(|(k, v)| !inner.contains_edge(*k) && edges.contains(v))
}

/// Whether some element of B inside `inner` lands on a marked element.
fn touches_inside(o: &Overlap, inner: &Pattern, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> bool {
    o.b.nodes.iter().any(|(k, v)| inner.contains_node(*k) && nodes.contains(v))
        || o.b.edges.iter().any(|(k, v)| inner.contains_edge(*k) && edges.contains(v))
}

fn restrict(m: &Embedding, p: &Pattern) -> Embedding {
    Embedding {
        nodes: m.nodes.iter().filter(|(k, _)| p.contains_node(**k)).map(|(k, v)| (*k, *v)).collect(),
        edges: m.edges.iter().filter(|(k, _)| p.contains_edge(**k)).map(|(k, v)| (*k, *v)).collect(),
    }
}

/// One matrix cell: what applying `first` does to `second`.
#[derive(Debug, Clone)]
pub struct CpaCell {
    pub first: String,
    pub second: String,
    pub pairs: Vec<CriticalPair>,
}

impl CpaCell {
    /// Distinct kinds found, in kind order.
    pub fn kinds(&self) -> Vec<ConflictKind> {
        self.pairs.iter().map(|p| p.kind).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn has_conflict(&self) -> bool {
        self.pairs.iter().any(|p| p.kind.is_conflict())
    }

    pub fn has_dependency(&self) -> bool {
        self.pairs.iter().any(|p| !p.kind.is_conflict())
    }
}

/// Conflicts and dependencies for every ordered pair of rules.
#[derive(Debug, Clone)]
pub struct CpaMatrix {
    pub rules: Vec<String>,
    /// Row-major: `cells[i * n + j]` is (rules\[i\], rules\[j\]).
    pub cells: Vec<CpaCell>,
}

/// Runs both analyses over all ordered pairs, spreading the cells over the
/// available cores. The result does not depend on scheduling.
pub fn cpa_matrix(rules: &[Rule], opts: &CpaOptions) -> Result<CpaMatrix, CpaError> {
    let pairs: Vec<(usize, usize)> = (0..rules.len())
        .flat_map(|i| (0..rules.len()).map(move |j| (i, j)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<BTreeMap<usize, Result<Vec<CriticalPair>, CpaError>>> = Mutex::new(BTreeMap::new());
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(pairs.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, j)) = pairs.get(k) else { break };
                let r = critical_pairs(&rules[i], &rules[j], opts).and_then(|mut v| {
                    v.extend(sequential_dependencies(&rules[i], &rules[j], opts)?);
                    Ok(v)
                });
                results.lock().expect("not poisoned").insert(k, r);
            });
        }
    });
    let results = results.into_inner().expect("not poisoned");
    let mut cells = Vec::with_capacity(pairs.len());
    for ((i, j), r) in pairs.into_iter().zip(results.into_values()) {
        cells.push(CpaCell {
            first: rules[i].name().to_owned(),
            second: rules[j].name().to_owned(),
            pairs: r?,
        });
    }
    Ok(CpaMatrix {
        rules: rules.iter().map(|r| r.name().to_owned()).collect(),
        cells,
    })
}

#[derive(Serialize)]
struct PairDoc<'a> {
    kind: ConflictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    nac: Option<&'a str>,
    overlap: &'a Pattern,
}

#[derive(Serialize)]
struct CellDoc<'a> {
    first: &'a str,
    second: &'a str,
    kinds: Vec<ConflictKind>,
    pairs: Vec<PairDoc<'a>>,
}

#[derive(Serialize)]
struct MatrixDoc<'a> {
    format: &'static str,
    rules: &'a [String],
    cells: Vec<CellDoc<'a>>,
}

impl CpaMatrix {
    pub fn cell(&self, first: &str, second: &str) -> Option<&CpaCell> {
        self.cells.iter().find(|c| c.first == first && c.second == second)
    }

    /// Plain-text grid: rows apply first, columns are affected.
    pub fn to_table(&self) -> String {
        let label = |c: &CpaCell| {
            let kinds = c.kinds();
            if kinds.is_empty() {
                "-".to_owned()
            } else {
                kinds.iter().map(|k| k.abbrev()).collect::<Vec<_>>().join(",")
            }
        };
        let n = self.rules.len();
        let head = self.rules.iter().map(String::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| label(&self.cells[i * n + j]).len())
                    .chain([self.rules[j].len()])
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let mut s = String::new();
        let _ = write!(s, "{:head$}", "");
        for (j, r) in self.rules.iter().enumerate() {
            let _ = write!(s, " | {:w$}", r, w = widths[j]);
        }
        s.push('\n');
        for (i, r) in self.rules.iter().enumerate() {
            let _ = write!(s, "{r:head$}");
            for j in 0..n {
                let _ = write!(s, " | {:w$}", label(&self.cells[i * n + j]), w = widths[j]);
            }
            s.push('\n');
        }
        s.push_str("DU delete-use, PF produce-forbid, PU produce-use, DF delete-forbid\n");
        s.lines().map(|l| format!("{}\n", l.trim_end())).collect()
    }

    /// Full result with witness overlaps.
    pub fn to_json(&self) -> String {
        let doc = MatrixDoc {
            format: CPA_FORMAT,
            rules: &self.rules,
            cells: self
                .cells
                .iter()
                .filter(|c| !c.pairs.is_empty())
                .map(|c| CellDoc {
                    first: &c.first,
                    second: &c.second,
                    kinds: c.kinds(),
                    pairs: c
                        .pairs
                        .iter()
                        .map(|p| PairDoc {
                            kind: p.kind,
                            nac: p.nac.as_deref(),
                            overlap: &p.overlap,
                        })
                        .collect(),
                })
                .collect(),
        };
        crate::cosa::to_canonical_json(&doc)
    }

    /// Graphviz digraph: solid edges for conflicts, dotted for dependencies.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cpa {\n");
        for r in &self.rules {
            let _ = writeln!(s, "  \"{r}\";");
        }
        for c in &self.cells {
            let kinds = c.kinds();
            let conflicts: Vec<&str> = kinds.iter().filter(|k| k.is_conflict()).map(|k| k.as_str()).collect();
            let deps: Vec<&str> = kinds.iter().filter(|k| !k.is_conflict()).map(|k| k.as_str()).collect();
            if !conflicts.is_empty() {
                let _ = writeln!(
                    s,
                    "  \"{}\" -> \"{}\" [style=solid, label=\"{}\"];",
                    c.first,
                    c.second,
                    conflicts.join(",")
                );
            }
            if !deps.is_empty() {
                let _ = writeln!(
                    s,
                    "  \"{}\" -> \"{}\" [style=dotted, label=\"{}\"];",
                    c.first,
                    c.second,
                    deps.join(",")
                );
            }
        }
        s.push_str("}\n");
        s
    }
}
