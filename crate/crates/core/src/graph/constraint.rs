use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::check::label;
use super::matching::{for_each_embedding, has_embedding, AttrMode, Bindings, Embedding};
use super::{ConformanceReport, Graph, GraphError, HostAttr, Pattern, TypeGraph, Violation};

/// One clause of a graph constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Clause {
    /// No injective occurrence of the pattern may exist.
    Forbidden(Pattern),
    /// Every occurrence of `premise` must extend to at least one of the
    /// `conclusions`. Conclusions share ids with the premise and may refine
    /// the types of shared nodes.
    Conditional {
        premise: Pattern,
        conclusions: Vec<Pattern>,
    },
}

/// A named well-formedness condition made of one or more clauses, all of
/// which must hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphConstraint {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub clauses: Vec<Clause>,
}

impl GraphConstraint {
    pub fn forbidden(name: &str, description: &str, patterns: Vec<Pattern>) -> Self {
        GraphConstraint {
            name: name.to_owned(),
            description: description.to_owned(),
            clauses: patterns.into_iter().map(Clause::Forbidden).collect(),
        }
    }

    pub fn conditional(name: &str, description: &str, premise: Pattern, conclusions: Vec<Pattern>) -> Self {
        GraphConstraint {
            name: name.to_owned(),
            description: description.to_owned(),
            clauses: vec![Clause::Conditional { premise, conclusions }],
        }
    }

    /// Forbidden patterns of this constraint (empty for purely conditional ones).
    pub fn forbidden_patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.clauses.iter().filter_map(|c| match c {
            Clause::Forbidden(p) => Some(p),
            Clause::Conditional { .. } => None,
        })
    }

    /// Checks pattern typing and that each conclusion contains its premise.
    pub fn validate(&self, tg: &TypeGraph) -> Result<(), GraphError> {
        for clause in &self.clauses {
            match clause {
                Clause::Forbidden(p) => check_types(p, tg)?,
                Clause::Conditional { premise, conclusions } => {
                    check_types(premise, tg)?;
                    for c in conclusions {
                        check_types(c, tg)?;
                        for n in premise.nodes() {
                            let cn = c.node(n.id).ok_or(GraphError::UnknownNode(n.id))?;
                            if !tg.is_subtype(&cn.ty, &n.ty) {
                                return Err(GraphError::UnknownNodeType(cn.ty.clone()));
                            }
                        }
                        for e in premise.edges() {
                            let ce = c.edge(e.id).ok_or(GraphError::UnknownEdge(e.id))?;
                            if ce.ty != e.ty || ce.src != e.src || ce.tgt != e.tgt {
                                return Err(GraphError::UnknownEdge(e.id));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_types(p: &Pattern, tg: &TypeGraph) -> Result<(), GraphError> {
    for n in p.nodes() {
        if tg.node_type(&n.ty).is_none() {
            return Err(GraphError::UnknownNodeType(n.ty.clone()));
        }
    }
    for e in p.edges() {
        if tg.edge_type(&e.ty).is_none() {
            return Err(GraphError::UnknownEdgeType(e.ty.clone()));
        }
    }
    Ok(())
}

fn witness<H: HostAttr>(name: &str, desc: &str, g: &Graph<H>, emb: &Embedding) -> Violation {
    let at: Vec<String> = emb.nodes.values().map(|&n| label(g, n)).collect();
    let message = if desc.is_empty() {
        format!("{name} violated at {}", at.join(", "))
    } else {
        format!("{name}: {desc} (at {})", at.join(", "))
    };
    Violation::new(name, message)
        .with_nodes(emb.nodes.values().copied())
        .with_edges(emb.edges.values().copied())
}

/// Forbidden clauses report one violation per occurrence; conditional
/// clauses report one per premise occurrence that extends to no conclusion.
pub fn check_constraint<H: HostAttr>(
    g: &Graph<H>,
    c: &GraphConstraint,
    tg: &TypeGraph,
) -> Result<ConformanceReport, GraphError> {
    c.validate(tg)?;
    let env = Bindings::new();
    let mut out = Vec::new();
    for clause in &c.clauses {
        match clause {
            Clause::Forbidden(p) => {
                let mut found = Vec::new();
                for_each_embedding(p, g, tg, &Embedding::default(), &env, AttrMode::Check, |e, _| {
                    found.push(e.clone());
                    ControlFlow::Continue(())
                });
                found.sort_by_key(Embedding::sort_key);
                out.extend(found.iter().map(|e| witness(&c.name, &c.description, g, e)));
            }
            Clause::Conditional { premise, conclusions } => {
                let mut found = Vec::new();
                for_each_embedding(premise, g, tg, &Embedding::default(), &env, AttrMode::Check, |e, b| {
                    let satisfied = conclusions
                        .iter()
                        .any(|concl| has_embedding(concl, g, tg, e, b, AttrMode::Check));
                    if !satisfied {
                        found.push(e.clone());
                    }
                    ControlFlow::Continue(())
                });
                found.sort_by_key(Embedding::sort_key);
                out.extend(found.iter().map(|e| witness(&c.name, &c.description, g, e)));
            }
        }
    }
    Ok(ConformanceReport::from_violations(out))
}

pub fn check_constraints<'a, H: HostAttr>(
    g: &Graph<H>,
    constraints: impl IntoIterator<Item = &'a GraphConstraint>,
    tg: &TypeGraph,
) -> Result<ConformanceReport, GraphError> {
    let mut report = ConformanceReport::ok();
    for c in constraints {
        report.merge(check_constraint(g, c, tg)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::{AttrKind, EdgeType, HostGraph, NodeType};

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

    #[test]
    fn forbidden_self_loop() {
        let mut p = Pattern::new();
        let x = p.add_node("C", BTreeMap::new());
        p.add_edge("e", x, x).unwrap();
        let c = GraphConstraint::forbidden("no-loop", "", vec![p]);
        let mut g = HostGraph::new();
        let a = g.add_node("C", BTreeMap::new());
        assert!(check_constraint(&g, &c, &tg()).unwrap().ok);
        g.add_edge("e", a, a).unwrap();
        let r = check_constraint(&g, &c, &tg()).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].code, "no-loop");
    }

    #[test]
    fn conditional_with_type_refining_conclusions() {
        // every C is an S or has an outgoing e-edge
        let mut premise = Pattern::new();
        let x = premise.add_node("C", BTreeMap::new());
        let mut is_s = Pattern::new();
        is_s.insert_node(x, "S", BTreeMap::new()).unwrap();
        let mut linked = premise.clone();
        let y = linked.add_node("C", BTreeMap::new());
        linked.add_edge("e", x, y).unwrap();
        let c = GraphConstraint::conditional("cond", "needs link", premise, vec![is_s, linked]);

        let mut g = HostGraph::new();
        let a = g.add_node("C", BTreeMap::new());
        let b = g.add_node("S", BTreeMap::new());
        let r = check_constraint(&g, &c, &tg()).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].nodes.contains(&a));
        g.add_edge("e", a, b).unwrap();
        assert!(check_constraint(&g, &c, &tg()).unwrap().ok);
    }

    #[test]
    fn unknown_pattern_type_is_error() {
        let mut p = Pattern::new();
        p.add_node("Nope", BTreeMap::new());
        let c = GraphConstraint::forbidden("x", "", vec![p]);
        assert!(check_constraint(&HostGraph::new(), &c, &tg()).is_err());
    }
}
