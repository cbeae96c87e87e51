//! Graph transformation rules with negative application conditions.
//!
//! A rule is a pair of patterns sharing ids: elements present in both sides
//! are preserved, left-only elements are deleted and right-only elements are
//! created. Application is double-pushout style: it refuses to delete a node
//! that would leave a dangling edge.

mod doc;
mod sequence;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::matching::{embeddings, has_embedding, AttrMode, Bindings, Embedding};
use crate::graph::{
    AttrExpr, AttrKind, EdgeId, GraphError, HostGraph, NodeId, Pattern, TypeGraph, Value,
};

pub use doc::{parse_rules, rules_to_json, RuleDoc, RuleParseError, RuleSetDoc, RULE_FORMAT, RULE_SET_FORMAT};
pub use sequence::{
    apply_sequence, ApplicationTrace, Choice, FirstMatch, MatchChooser, Repetition, RuleSequence,
    SequenceError, SequenceItem, TraceStep, DEFAULT_MAX_REWRITES,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("rule `{rule}` needs a binding for parameter `{param}`")]
    UnboundParam { rule: String, param: String },
    #[error("rule `{rule}`: attribute variable `{var}` is unbound")]
    UnboundVariable { rule: String, var: String },
    #[error("gluing condition violated by rule `{rule}`: deleting {node} leaves dangling edges {edges:?}")]
    Gluing {
        rule: String,
        node: NodeId,
        edges: Vec<EdgeId>,
    },
    #[error("stale match for rule `{rule}`: host graph changed since matching")]
    StaleMatch { rule: String },
    #[error("match does not belong to rule `{rule}`")]
    ForeignMatch { rule: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A negative application condition: a named pattern extending the LHS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nac {
    pub name: String,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    name: String,
    lhs: Pattern,
    rhs: Pattern,
    nacs: Vec<Nac>,
    params: Vec<(String, AttrKind)>,
}

fn invalid(rule: &str, reason: impl Into<String>) -> RewriteError {
    RewriteError::InvalidRule {
        rule: rule.to_owned(),
        reason: reason.into(),
    }
}

fn vars_of(attrs: &BTreeMap<String, AttrExpr>) -> impl Iterator<Item = &str> {
    attrs.values().filter_map(|a| match a {
        AttrExpr::Var(v) => Some(v.as_str()),
        AttrExpr::Const(_) => None,
    })
}

impl Rule {
    /// Builds a rule, checking its structural invariants (see [`RewriteError::InvalidRule`]).
    pub fn new(
        name: &str,
        lhs: Pattern,
        rhs: Pattern,
        nacs: Vec<Nac>,
        params: Vec<(String, AttrKind)>,
    ) -> Result<Rule, RewriteError> {
        let rule = Rule {
            name: name.to_owned(),
            lhs,
            rhs,
            nacs,
            params,
        };
        rule.check()?;
        Ok(rule)
    }

    fn check(&self) -> Result<(), RewriteError> {
        let name = &self.name;
        let ids = |p: &Pattern| -> Result<(), RewriteError> {
            let nodes: BTreeSet<u32> = p.node_ids().map(|n| n.0).collect();
            if let Some(clash) = p.edge_ids().find(|e| nodes.contains(&e.0)) {
                return Err(invalid(name, format!("id {} names both a node and an edge", clash.0)));
            }
            Ok(())
        };
        ids(&self.lhs)?;
        ids(&self.rhs)?;

        for n in self.lhs.nodes() {
            if let Some(r) = self.rhs.node(n.id) {
                if r.ty != n.ty {
                    return Err(invalid(name, format!("preserved node {} changes type", n.id)));
                }
                if r.attrs != n.attrs && !r.attrs.is_empty() {
                    return Err(invalid(name, format!("preserved node {} changes attributes", n.id)));
                }
            }
        }
        for e in self.lhs.edges() {
            if let Some(r) = self.rhs.edge(e.id) {
                if r.ty != e.ty || r.src != e.src || r.tgt != e.tgt {
                    return Err(invalid(name, format!("preserved edge {} changes shape", e.id)));
                }
            }
        }
        for e in self.rhs.edges() {
            if self.lhs.contains_edge(e.id) {
                continue;
            }
            for end in [e.src, e.tgt] {
                if !self.rhs.contains_node(end) {
                    return Err(invalid(name, format!("created edge {} has no endpoint {end}", e.id)));
                }
            }
        }

        let mut seen = BTreeSet::new();
        for (p, _) in &self.params {
            if !seen.insert(p.as_str()) {
                return Err(invalid(name, format!("duplicate parameter `{p}`")));
            }
        }
        let mut bound: BTreeSet<&str> = self.params.iter().map(|(p, _)| p.as_str()).collect();
        for n in self.lhs.nodes() {
            bound.extend(vars_of(&n.attrs));
        }
        for e in self.lhs.edges() {
            bound.extend(vars_of(&e.attrs));
        }
        let rhs_vars = self
            .rhs
            .nodes()
            .flat_map(|n| vars_of(&n.attrs))
            .chain(self.rhs.edges().flat_map(|e| vars_of(&e.attrs)));
        for v in rhs_vars {
            if !bound.contains(v) {
                return Err(invalid(name, format!("variable `{v}` is bound neither in the LHS nor by a parameter")));
            }
        }

        for nac in &self.nacs {
            for n in self.lhs.nodes() {
                if !nac.pattern.contains_node(n.id) {
                    return Err(invalid(name, format!("NAC {} does not contain LHS node {}", nac.name, n.id)));
                }
            }
            for e in self.lhs.edges() {
                match nac.pattern.edge(e.id) {
                    Some(ne) if ne.ty == e.ty && ne.src == e.src && ne.tgt == e.tgt => {}
                    _ => {
                        return Err(invalid(name, format!("NAC {} does not contain LHS edge {}", nac.name, e.id)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that every pattern of the rule is typed over `tg`, with NAC
    /// nodes refining (never widening) the LHS node types.
    pub fn check_types(&self, tg: &TypeGraph) -> Result<(), RewriteError> {
        let pats = [&self.lhs, &self.rhs]
            .into_iter()
            .chain(self.nacs.iter().map(|n| &n.pattern));
        for p in pats {
            for n in p.nodes() {
                if tg.node_type(&n.ty).is_none() {
                    return Err(GraphError::UnknownNodeType(n.ty.clone()).into());
                }
            }
            for e in p.edges() {
                if tg.edge_type(&e.ty).is_none() {
                    return Err(GraphError::UnknownEdgeType(e.ty.clone()).into());
                }
            }
        }
        for n in self.rhs.nodes() {
            if !self.lhs.contains_node(n.id) && !tg.is_concrete(&n.ty) {
                return Err(invalid(&self.name, format!("creates abstract node type {}", n.ty)));
            }
        }
        for nac in &self.nacs {
            for n in self.lhs.nodes() {
                let refined = &nac.pattern.node(n.id).expect("checked").ty;
                if !tg.is_subtype(refined, &n.ty) {
                    return Err(invalid(&self.name, format!("NAC {} widens the type of {}", nac.name, n.id)));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Pattern {
        &self.lhs
    }

    pub fn rhs(&self) -> &Pattern {
        &self.rhs
    }

    pub fn nacs(&self) -> &[Nac] {
        &self.nacs
    }

    pub fn params(&self) -> &[(String, AttrKind)] {
        &self.params
    }

    pub fn is_preserved_node(&self, id: NodeId) -> bool {
        self.lhs.contains_node(id) && self.rhs.contains_node(id)
    }

    pub fn is_preserved_edge(&self, id: EdgeId) -> bool {
        self.lhs.contains_edge(id) && self.rhs.contains_edge(id)
    }

    pub fn deleted_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.lhs.node_ids().filter(|n| !self.rhs.contains_node(*n))
    }

    pub fn deleted_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.lhs.edge_ids().filter(|e| !self.rhs.contains_edge(*e))
    }

    pub fn created_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.rhs.node_ids().filter(|n| !self.lhs.contains_node(*n))
    }

    pub fn created_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.rhs.edge_ids().filter(|e| !self.lhs.contains_edge(*e))
    }

    /// Whether the rule deletes anything.
    pub fn is_deleting(&self) -> bool {
        self.deleted_nodes().next().is_some() || self.deleted_edges().next().is_some()
    }

    fn check_params(&self, bindings: &Bindings) -> Result<(), RewriteError> {
        for (p, kind) in &self.params {
            match bindings.get(p) {
                None => {
                    return Err(RewriteError::UnboundParam {
                        rule: self.name.clone(),
                        param: p.clone(),
                    })
                }
                Some(v) if v.kind() != *kind => {
                    return Err(invalid(&self.name, format!("parameter `{p}` must be {kind:?}")));
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Whether some NAC extends `emb` into `host`.
    pub fn nac_violated(&self, host: &HostGraph, tg: &TypeGraph, emb: &Embedding, env: &Bindings) -> Option<&str> {
        self.nacs
            .iter()
            .find(|nac| has_embedding(&nac.pattern, host, tg, emb, env, AttrMode::Check))
            .map(|nac| nac.name.as_str())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// An occurrence of a rule's LHS in a host graph that satisfies every NAC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub rule: String,
    pub embedding: Embedding,
    pub bindings: Bindings,
    pub host_digest: String,
}

impl Match {
    /// Human-readable image of the LHS nodes, e.g. `1→Component 'Order'`.
    pub fn summary(&self, host: &HostGraph) -> String {
        self.embedding
            .nodes
            .iter()
            .map(|(p, h)| {
                let n = host.node(*h);
                match (n, host.name_of(*h)) {
                    (Some(n), Some(name)) => format!("{}→{} '{name}'", p.0, n.ty),
                    (Some(n), None) => format!("{}→{} {h}", p.0, n.ty),
                    _ => format!("{}→{h}", p.0),
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// All NAC-satisfying injective matches, in canonical order (host node ids
/// in LHS-id order, then edge ids). An empty LHS yields exactly one match
/// when all NACs hold.
pub fn find_matches(
    rule: &Rule,
    host: &HostGraph,
    tg: &TypeGraph,
    bindings: &Bindings,
) -> Result<Vec<Match>, RewriteError> {
    rule.check_params(bindings)?;
    let digest = host.digest();
    let found = embeddings(&rule.lhs, host, tg, &Embedding::default(), bindings, AttrMode::Check);
    Ok(found
        .into_iter()
        .filter(|(emb, env)| rule.nac_violated(host, tg, emb, env).is_none())
        .map(|(embedding, bindings)| Match {
            rule: rule.name.clone(),
            embedding,
            bindings,
            host_digest: digest.clone(),
        })
        .collect())
}

fn eval(rule: &Rule, attrs: &BTreeMap<String, AttrExpr>, env: &Bindings) -> Result<BTreeMap<String, Value>, RewriteError> {
    attrs
        .iter()
        .map(|(k, a)| {
            let v = match a {
                AttrExpr::Const(v) => v.clone(),
                AttrExpr::Var(x) => env.get(x).cloned().ok_or_else(|| RewriteError::UnboundVariable {
                    rule: rule.name.clone(),
                    var: x.clone(),
                })?,
            };
            Ok((k.clone(), v))
        })
        .collect()
}

/// Result of an application: the new graph plus where created elements landed.
#[derive(Debug, Clone)]
pub struct Application {
    pub graph: HostGraph,
    pub created_nodes: BTreeMap<NodeId, NodeId>,
    pub created_edges: BTreeMap<EdgeId, EdgeId>,
}

/// Applies `rule` at `m`, enforcing the gluing condition.
pub fn apply(rule: &Rule, host: &HostGraph, m: &Match) -> Result<HostGraph, RewriteError> {
    apply_traced(rule, host, m).map(|a| a.graph)
}

pub fn apply_traced(rule: &Rule, host: &HostGraph, m: &Match) -> Result<Application, RewriteError> {
    if m.rule != rule.name {
        return Err(RewriteError::ForeignMatch { rule: rule.name.clone() });
    }
    if host.digest() != m.host_digest {
        return Err(RewriteError::StaleMatch { rule: rule.name.clone() });
    }
    rewrite(rule, host, &m.embedding, &m.bindings)
}

/// The rewriting step proper, without match bookkeeping. Also used by the
/// analyses, which work on hosts they build themselves.
pub(crate) fn rewrite(
    rule: &Rule,
    host: &HostGraph,
    emb: &Embedding,
    env: &Bindings,
) -> Result<Application, RewriteError> {
    let deleted_edges: BTreeSet<EdgeId> = rule
        .deleted_edges()
        .map(|e| emb.edge(e).ok_or(GraphError::UnknownEdge(e)))
        .collect::<Result<_, _>>()?;
    let deleted_nodes: Vec<NodeId> = rule
        .deleted_nodes()
        .map(|n| emb.node(n).ok_or(GraphError::UnknownNode(n)))
        .collect::<Result<_, _>>()?;
    for &n in &deleted_nodes {
        let dangling: Vec<EdgeId> = host
            .incident_edges(n)
            .map(|e| e.id)
            .filter(|e| !deleted_edges.contains(e))
            .collect();
        if !dangling.is_empty() {
            return Err(RewriteError::Gluing {
                rule: rule.name.clone(),
                node: n,
                edges: dangling,
            });
        }
    }

    let mut g = host.clone();
    for &e in &deleted_edges {
        g.remove_edge(e)?;
    }
    for &n in &deleted_nodes {
        g.remove_node(n)?;
    }

    let mut created_nodes = BTreeMap::new();
    let mut next = host.next_node_id().0;
    for id in rule.created_nodes() {
        let rn = rule.rhs.node(id).expect("rhs node");
        let attrs = eval(rule, &rn.attrs, env)?;
        let new_id = g.insert_node(NodeId(next), rn.ty.clone(), attrs)?;
        next += 1;
        created_nodes.insert(id, new_id);
    }
    let image = |n: NodeId| created_nodes.get(&n).copied().or_else(|| emb.node(n));
    let mut created_edges = BTreeMap::new();
    let mut next = host.next_edge_id().0;
    for id in rule.created_edges() {
        let re = rule.rhs.edge(id).expect("rhs edge");
        let attrs = eval(rule, &re.attrs, env)?;
        let src = image(re.src).ok_or(GraphError::UnknownNode(re.src))?;
        let tgt = image(re.tgt).ok_or(GraphError::UnknownNode(re.tgt))?;
        let new_id = g.insert_edge(EdgeId(next), re.ty.clone(), src, tgt, attrs)?;
        next += 1;
        created_edges.insert(id, new_id);
    }
    Ok(Application {
        graph: g,
        created_nodes,
        created_edges,
    })
}
