use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Nac, RewriteError, Rule};
use crate::graph::{AttrExpr, AttrKind, Edge, GraphDoc, Node, Pattern};

pub const RULE_FORMAT: &str = "archevol/rule@1";
pub const RULE_SET_FORMAT: &str = "archevol/rules@1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub name: String,
    pub kind: AttrKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NacDoc {
    pub name: String,
    #[serde(default)]
    pub nodes: Vec<Node<AttrExpr>>,
    #[serde(default)]
    pub edges: Vec<Edge<AttrExpr>>,
}

/// On-disk form of a rule. Node and edge ids share one numbering per rule;
/// `preservedIds` must list exactly the ids present on both sides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleDoc {
    #[serde(default = "rule_format")]
    pub format: String,
    pub name: String,
    #[serde(default)]
    pub params: Vec<ParamDoc>,
    pub lhs: GraphDoc<AttrExpr>,
    pub rhs: GraphDoc<AttrExpr>,
    #[serde(default)]
    pub preserved_ids: Vec<u32>,
    #[serde(default)]
    pub nacs: Vec<NacDoc>,
}

fn rule_format() -> String {
    RULE_FORMAT.to_owned()
}

fn rule_set_format() -> String {
    RULE_SET_FORMAT.to_owned()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleSetDoc {
    #[serde(default = "rule_set_format")]
    pub format: String,
    pub rules: Vec<RuleDoc>,
}

fn shared_ids(l: &Pattern, r: &Pattern) -> BTreeSet<u32> {
    let nodes = l.node_ids().filter(|n| r.contains_node(*n)).map(|n| n.0);
    let edges = l.edge_ids().filter(|e| r.contains_edge(*e)).map(|e| e.0);
    nodes.chain(edges).collect()
}

impl From<&Rule> for RuleDoc {
    fn from(r: &Rule) -> Self {
        RuleDoc {
            format: RULE_FORMAT.to_owned(),
            name: r.name.clone(),
            params: r
                .params
                .iter()
                .map(|(name, kind)| ParamDoc {
                    name: name.clone(),
                    kind: *kind,
                })
                .collect(),
            lhs: GraphDoc::from(&r.lhs),
            rhs: GraphDoc::from(&r.rhs),
            preserved_ids: shared_ids(&r.lhs, &r.rhs).into_iter().collect(),
            nacs: r
                .nacs
                .iter()
                .map(|n| {
                    let d = GraphDoc::from(&n.pattern);
                    NacDoc {
                        name: n.name.clone(),
                        nodes: d.nodes,
                        edges: d.edges,
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<RuleDoc> for Rule {
    type Error = RewriteError;

    fn try_from(d: RuleDoc) -> Result<Rule, RewriteError> {
        let bad = |reason: String| RewriteError::InvalidRule {
            rule: d.name.clone(),
            reason,
        };
        if d.format != RULE_FORMAT {
            return Err(bad(format!("unsupported format `{}`", d.format)));
        }
        let lhs = Pattern::try_from(d.lhs.clone())?;
        let rhs = Pattern::try_from(d.rhs.clone())?;
        let declared: BTreeSet<u32> = d.preserved_ids.iter().copied().collect();
        let shared = shared_ids(&lhs, &rhs);
        if declared != shared {
            return Err(bad(format!(
                "preservedIds {declared:?} differ from ids shared by lhs and rhs {shared:?}"
            )));
        }
        let nacs = d
            .nacs
            .iter()
            .map(|n| {
                Ok(Nac {
                    name: n.name.clone(),
                    pattern: Pattern::from_parts(n.nodes.clone(), n.edges.clone())?,
                })
            })
            .collect::<Result<Vec<_>, RewriteError>>()?;
        let params = d.params.iter().map(|p| (p.name.clone(), p.kind)).collect();
        Rule::new(&d.name, lhs, rhs, nacs, params)
    }
}

impl Rule {
    pub fn to_json(&self) -> String {
        crate::cosa::to_canonical_json(&RuleDoc::from(self))
    }

    pub fn from_json(text: &str) -> Result<Rule, RuleParseError> {
        let doc: RuleDoc = serde_json::from_str(text)?;
        Ok(Rule::try_from(doc)?)
    }
}

/// Parses either a single rule document or a rule set.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleParseError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("rules").is_some() {
        let set: RuleSetDoc = serde_json::from_value(value)?;
        if set.format != RULE_SET_FORMAT {
            return Err(RuleParseError::Format(set.format));
        }
        set.rules
            .into_iter()
            .map(|d| Rule::try_from(d).map_err(Into::into))
            .collect()
    } else {
        let doc: RuleDoc = serde_json::from_value(value)?;
        Ok(vec![Rule::try_from(doc)?])
    }
}

pub fn rules_to_json(rules: &[Rule]) -> String {
    let set = RuleSetDoc {
        format: RULE_SET_FORMAT.to_owned(),
        rules: rules.iter().map(RuleDoc::from).collect(),
    };
    crate::cosa::to_canonical_json(&set)
}

#[derive(Debug, thiserror::Error)]
pub enum RuleParseError {
    #[error("malformed rule document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported rule set format `{0}`")]
    Format(String),
    #[error(transparent)]
    Rule(#[from] RewriteError),
}
