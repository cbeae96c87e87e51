//! Architectural styles: node-type refinements with count bounds plus extra
//! graph constraints, checked on top of the ADL metamodel.

use serde::{Deserialize, Serialize};

use crate::analysis::CpaOptions;
use crate::cosa::{
    base_invariants, check_format, check_graph, cosa_type_graph, encode, to_canonical_json, ty, ArchError,
    Architecture, FormatError, Pat,
};
use crate::graph::{ConformanceReport, GraphConstraint, GraphError, Multiplicity, NodeType, TypeGraph, TypeGraphError};

pub const STYLE_FORMAT: &str = "archevol/style@1";
pub const CLIENT_SERVER: &str = "client-server";

/// A node type introduced or refined by a style.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StyleNodeType {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supertype: Option<String>,
    #[serde(default)]
    pub count_min: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Style {
    pub name: String,
    pub node_types: Vec<StyleNodeType>,
    #[serde(default)]
    pub constraints: Vec<GraphConstraint>,
}

#[derive(Debug, thiserror::Error)]
pub enum StyleError {
    #[error("style `{style}`: node type `{ty}` must subtype an existing type")]
    Unanchored { style: String, ty: String },
    #[error("style `{style}`: {source}")]
    TypeGraph {
        style: String,
        #[source]
        source: TypeGraphError,
    },
    #[error("style `{style}`: {source}")]
    Constraint {
        style: String,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Serialize, Deserialize)]
struct Doc {
    format: String,
    #[serde(flatten)]
    style: Style,
}

impl Style {
    /// The metamodel extended with this style's node types and counts.
    pub fn type_graph(&self) -> Result<TypeGraph, StyleError> {
        let base = cosa_type_graph();
        let mut added = Vec::new();
        for t in &self.node_types {
            let existing = base.node_type(&t.name).is_some();
            let anchored = t
                .supertype
                .as_deref()
                .is_some_and(|s| base.node_type(s).is_some() || added.iter().any(|a: &NodeType| a.name == s));
            if !existing && !anchored {
                return Err(StyleError::Unanchored {
                    style: self.name.clone(),
                    ty: t.name.clone(),
                });
            }
            let mut nt = NodeType::concrete(&t.name).with_count(Multiplicity::new(t.count_min, t.count_max));
            nt.supertype = t.supertype.clone();
            added.push(nt);
        }
        let tg = base.extend(added, []).map_err(|source| StyleError::TypeGraph {
            style: self.name.clone(),
            source,
        })?;
        for c in &self.constraints {
            c.validate(&tg).map_err(|source| StyleError::Constraint {
                style: self.name.clone(),
                source,
            })?;
        }
        Ok(tg)
    }

    /// Analysis context for rules working under this style: its type graph,
    /// with the base invariants and the style constraints as filters.
    pub fn cpa_options(&self) -> Result<CpaOptions, StyleError> {
        let mut constraints = base_invariants();
        constraints.extend(self.constraints.iter().cloned());
        Ok(CpaOptions::new(self.type_graph()?).with_constraints(constraints))
    }

    pub fn to_document(&self) -> String {
        to_canonical_json(&Doc {
            format: STYLE_FORMAT.to_owned(),
            style: self.clone(),
        })
    }

    /// Parses a style document and checks it against the metamodel.
    pub fn from_document(text: &str) -> Result<Style, StyleError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(FormatError::from)?;
        check_format(&value, STYLE_FORMAT)?;
        let doc: Doc = serde_json::from_value(value).map_err(FormatError::from)?;
        doc.style.type_graph()?;
        Ok(doc.style)
    }
}

/// Exactly one Server, at least one Client, every Client connected with the
/// Server, and every other component nested inside them.
pub fn client_server_style() -> Style {
    use ty::*;
    let client = Pat::new().n(1, CLIENT);
    let linked = |s, t| client.clone().n(2, SERVER).e(3, CONNECTS_TO, s, t).done();
    let cs1 = GraphConstraint::conditional(
        "CS-1",
        "every client is connected to the server",
        client.clone().done(),
        vec![linked(1, 2), linked(2, 1)],
    );
    let any = Pat::new().n(1, COMPONENT);
    let cs2 = GraphConstraint::conditional(
        "CS-2",
        "only clients and the server may be top-level components",
        any.clone().done(),
        vec![
            any.clone().retype(1, CLIENT).done(),
            any.clone().retype(1, SERVER).done(),
            any.clone().n(2, CONFIGURATION).e(3, CONTAINS, 2, 1).done(),
        ],
    );
    let contained = |kind| Pat::new().n(1, kind).n(2, CONFIGURATION).e(3, CONTAINS, 2, 1).done();
    let cs3 = GraphConstraint::forbidden(
        "CS-3",
        "clients and the server are top-level components",
        vec![contained(CLIENT), contained(SERVER)],
    );
    Style {
        name: CLIENT_SERVER.to_owned(),
        node_types: vec![
            StyleNodeType {
                name: SERVER.to_owned(),
                supertype: Some(COMPONENT.to_owned()),
                count_min: 1,
                count_max: Some(1),
            },
            StyleNodeType {
                name: CLIENT.to_owned(),
                supertype: Some(COMPONENT.to_owned()),
                count_min: 1,
                count_max: None,
            },
        ],
        constraints: vec![cs1, cs2, cs3],
    }
}

/// Styles shipped with the engine.
pub fn builtin_styles() -> Vec<Style> {
    vec![client_server_style()]
}

pub fn style_by_name(name: &str) -> Option<Style> {
    builtin_styles().into_iter().find(|s| s.name == name)
}

/// Checks an architecture against the extended type graph (including node
/// counts), the base invariants and the style constraints.
pub fn check_style(a: &Architecture, s: &Style) -> Result<ConformanceReport, StyleError> {
    let tg = s.type_graph()?;
    let g = encode(a)?;
    check_graph(&g, &tg, &s.constraints).map_err(|source| StyleError::Constraint {
        style: s.name.clone(),
        source,
    })
}
