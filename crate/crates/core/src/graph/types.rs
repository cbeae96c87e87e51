use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    String,
    Integer,
}

/// Closed integer interval with an optional upper bound (`None` = unbounded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multiplicity {
    pub min: u32,
    pub max: Option<u32>,
}

impl Multiplicity {
    pub const ANY: Multiplicity = Multiplicity { min: 0, max: None };
    pub const ONE: Multiplicity = Multiplicity {
        min: 1,
        max: Some(1),
    };
    pub const OPTIONAL: Multiplicity = Multiplicity {
        min: 0,
        max: Some(1),
    };

    pub fn new(min: u32, max: Option<u32>) -> Self {
        Multiplicity { min, max }
    }

    pub fn contains(&self, n: usize) -> bool {
        n >= self.min as usize && self.max.is_none_or(|m| n <= m as usize)
    }

    pub fn exceeds_max(&self, n: usize) -> bool {
        self.max.is_some_and(|m| n > m as usize)
    }

    fn is_well_formed(&self) -> bool {
        self.max.is_none_or(|m| self.min <= m && m > 0)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(m) if m == self.min => write!(f, "exactly {}", number_word(m)),
            Some(m) => write!(f, "between {} and {}", number_word(self.min), number_word(m)),
            None => write!(f, "at least {}", number_word(self.min)),
        }
    }
}

fn number_word(n: u32) -> String {
    match n {
        0 => "zero".into(),
        1 => "one".into(),
        2 => "two".into(),
        _ => n.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeType {
    pub name: String,
    #[serde(default)]
    pub is_abstract: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supertype: Option<String>,
    #[serde(default)]
    pub attributes: Vec<(String, AttrKind)>,
    #[serde(default = "any_count")]
    pub count: Multiplicity,
}

fn any_count() -> Multiplicity {
    Multiplicity::ANY
}

impl NodeType {
    pub fn concrete(name: &str) -> Self {
        NodeType {
            name: name.to_owned(),
            is_abstract: false,
            supertype: None,
            attributes: Vec::new(),
            count: Multiplicity::ANY,
        }
    }

    pub fn abstract_type(name: &str) -> Self {
        NodeType {
            is_abstract: true,
            ..NodeType::concrete(name)
        }
    }

    pub fn with_supertype(mut self, sup: &str) -> Self {
        self.supertype = Some(sup.to_owned());
        self
    }

    pub fn with_attr(mut self, name: &str, kind: AttrKind) -> Self {
        self.attributes.push((name.to_owned(), kind));
        self
    }

    pub fn with_count(mut self, count: Multiplicity) -> Self {
        self.count = count;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One hop of a derivation path: traverse an edge of `edge_type` (forwards
/// or against its direction) and land on a node of `node_type`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PathStep {
    pub edge_type: String,
    pub direction: Direction,
    pub node_type: String,
}

impl PathStep {
    pub fn fwd(edge_type: &str, node_type: &str) -> Self {
        PathStep {
            edge_type: edge_type.to_owned(),
            direction: Direction::Forward,
            node_type: node_type.to_owned(),
        }
    }

    pub fn bwd(edge_type: &str, node_type: &str) -> Self {
        PathStep {
            edge_type: edge_type.to_owned(),
            direction: Direction::Backward,
            node_type: node_type.to_owned(),
        }
    }
}

/// Path expression defining a derived edge. Walks never reuse an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationPath {
    pub steps: Vec<PathStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeType {
    pub name: String,
    pub source: String,
    pub target: String,
    /// How many sources each target node may have along this edge type.
    pub source_mult: Multiplicity,
    /// How many targets each source node may have along this edge type.
    pub target_mult: Multiplicity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<DerivationPath>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<(String, AttrKind)>,
}

impl EdgeType {
    pub fn new(name: &str, source: &str, target: &str) -> Self {
        EdgeType {
            name: name.to_owned(),
            source: source.to_owned(),
            target: target.to_owned(),
            source_mult: Multiplicity::ANY,
            target_mult: Multiplicity::ANY,
            derivation: None,
            attributes: Vec::new(),
        }
    }

    pub fn mult(mut self, source_mult: Multiplicity, target_mult: Multiplicity) -> Self {
        self.source_mult = source_mult;
        self.target_mult = target_mult;
        self
    }

    pub fn derived(mut self, steps: Vec<PathStep>) -> Self {
        self.derivation = Some(DerivationPath { steps });
        self
    }

    pub fn is_derived(&self) -> bool {
        self.derivation.is_some()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TypeGraphError {
    #[error("duplicate node type `{0}`")]
    DuplicateNodeType(String),
    #[error("duplicate edge type `{0}`")]
    DuplicateEdgeType(String),
    #[error("node type `{ty}` has unknown supertype `{sup}`")]
    UnknownSupertype { ty: String, sup: String },
    #[error("supertype cycle through `{0}`")]
    InheritanceCycle(String),
    #[error("edge type `{edge}` references unknown node type `{node}`")]
    UnknownEndpoint { edge: String, node: String },
    #[error("malformed multiplicity on `{0}`")]
    BadMultiplicity(String),
    #[error("derivation path of `{0}` is malformed: {1}")]
    BadDerivation(String, String),
    #[error("refinement of `{ty}` changes its supertype")]
    RefinementChangesSupertype { ty: String },
}

/// Metamodel: node types with single inheritance and edge types with
/// endpoint multiplicities. Declaration order is kept; derived edge types
/// are materialized in that order, so a path may use an earlier derived type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TypeGraphDoc", into = "TypeGraphDoc")]
pub struct TypeGraph {
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
    node_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TypeGraphDoc {
    node_types: Vec<NodeType>,
    edge_types: Vec<EdgeType>,
}

impl TryFrom<TypeGraphDoc> for TypeGraph {
    type Error = TypeGraphError;

    fn try_from(doc: TypeGraphDoc) -> Result<Self, Self::Error> {
        TypeGraph::new(doc.node_types, doc.edge_types)
    }
}

impl From<TypeGraph> for TypeGraphDoc {
    fn from(tg: TypeGraph) -> Self {
        TypeGraphDoc {
            node_types: tg.node_types,
            edge_types: tg.edge_types,
        }
    }
}

impl TypeGraph {
    pub fn new(node_types: Vec<NodeType>, edge_types: Vec<EdgeType>) -> Result<Self, TypeGraphError> {
        let mut node_index = BTreeMap::new();
        for (i, nt) in node_types.iter().enumerate() {
            if node_index.insert(nt.name.clone(), i).is_some() {
                return Err(TypeGraphError::DuplicateNodeType(nt.name.clone()));
            }
            if !nt.count.is_well_formed() {
                return Err(TypeGraphError::BadMultiplicity(nt.name.clone()));
            }
        }
        let mut edge_index = BTreeMap::new();
        for (i, et) in edge_types.iter().enumerate() {
            if edge_index.insert(et.name.clone(), i).is_some() {
                return Err(TypeGraphError::DuplicateEdgeType(et.name.clone()));
            }
        }
        let tg = TypeGraph {
            node_types,
            edge_types,
            node_index,
            edge_index,
        };
        tg.validate()?;
        Ok(tg)
    }

    fn validate(&self) -> Result<(), TypeGraphError> {
        for nt in &self.node_types {
            if let Some(sup) = &nt.supertype {
                if !self.node_index.contains_key(sup) {
                    return Err(TypeGraphError::UnknownSupertype {
                        ty: nt.name.clone(),
                        sup: sup.clone(),
                    });
                }
            }
            let mut seen = BTreeSet::new();
            let mut cur = Some(nt.name.as_str());
            while let Some(name) = cur {
                if !seen.insert(name) {
                    return Err(TypeGraphError::InheritanceCycle(nt.name.clone()));
                }
                cur = self.node_type(name).and_then(|t| t.supertype.as_deref());
            }
        }
        for (i, et) in self.edge_types.iter().enumerate() {
            for end in [&et.source, &et.target] {
                if !self.node_index.contains_key(end) {
                    return Err(TypeGraphError::UnknownEndpoint {
                        edge: et.name.clone(),
                        node: end.clone(),
                    });
                }
            }
            if !et.source_mult.is_well_formed() || !et.target_mult.is_well_formed() {
                return Err(TypeGraphError::BadMultiplicity(et.name.clone()));
            }
            if let Some(path) = &et.derivation {
                self.validate_path(i, et, path)?;
            }
        }
        Ok(())
    }

    fn validate_path(&self, pos: usize, et: &EdgeType, path: &DerivationPath) -> Result<(), TypeGraphError> {
        let bad = |msg: String| TypeGraphError::BadDerivation(et.name.clone(), msg);
        if path.steps.is_empty() {
            return Err(bad("empty path".into()));
        }
        for step in &path.steps {
            let Some(&idx) = self.edge_index.get(&step.edge_type) else {
                return Err(bad(format!("unknown edge type `{}`", step.edge_type)));
            };
            if self.edge_types[idx].is_derived() && idx >= pos {
                return Err(bad(format!(
                    "derived step `{}` must be declared earlier",
                    step.edge_type
                )));
            }
            if !self.node_index.contains_key(&step.node_type) {
                return Err(bad(format!("unknown node type `{}`", step.node_type)));
            }
        }
        let last = &path.steps.last().expect("nonempty").node_type;
        if !self.is_subtype(last, &et.target) {
            return Err(bad(format!("path ends at `{last}`, not `{}`", et.target)));
        }
        Ok(())
    }

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }

    pub fn edge_types(&self) -> &[EdgeType] {
        &self.edge_types
    }

    pub fn node_type(&self, name: &str) -> Option<&NodeType> {
        self.node_index.get(name).map(|&i| &self.node_types[i])
    }

    pub fn edge_type(&self, name: &str) -> Option<&EdgeType> {
        self.edge_index.get(name).map(|&i| &self.edge_types[i])
    }

    /// Reflexive-transitive subtype test. Unknown names are never subtypes.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = self.node_type(sub);
        while let Some(t) = cur {
            if t.name == sup {
                return true;
            }
            cur = t.supertype.as_deref().and_then(|s| self.node_type(s));
        }
        false
    }

    /// The more specific of two types when one subtypes the other.
    pub fn meet<'a>(&self, a: &'a str, b: &'a str) -> Option<&'a str> {
        if self.is_subtype(a, b) {
            Some(a)
        } else if self.is_subtype(b, a) {
            Some(b)
        } else {
            None
        }
    }

    pub fn compatible(&self, a: &str, b: &str) -> bool {
        self.meet(a, b).is_some()
    }

    /// All attributes of a node type, inherited ones first.
    pub fn all_attributes(&self, name: &str) -> Vec<(String, AttrKind)> {
        let mut chain = Vec::new();
        let mut cur = self.node_type(name);
        while let Some(t) = cur {
            chain.push(t);
            cur = t.supertype.as_deref().and_then(|s| self.node_type(s));
        }
        chain
            .iter()
            .rev()
            .flat_map(|t| t.attributes.iter().cloned())
            .collect()
    }

    /// Adds node types; an entry whose name already exists refines the
    /// existing type's count bounds and must keep its supertype.
    pub fn extend(
        &self,
        node_types: impl IntoIterator<Item = NodeType>,
        edge_types: impl IntoIterator<Item = EdgeType>,
    ) -> Result<TypeGraph, TypeGraphError> {
        let mut nts = self.node_types.clone();
        for nt in node_types {
            match nts.iter_mut().find(|t| t.name == nt.name) {
                Some(existing) => {
                    if nt.supertype.is_some() && nt.supertype != existing.supertype {
                        return Err(TypeGraphError::RefinementChangesSupertype { ty: nt.name });
                    }
                    existing.count = nt.count;
                }
                None => nts.push(nt),
            }
        }
        let mut ets = self.edge_types.clone();
        ets.extend(edge_types);
        TypeGraph::new(nts, ets)
    }

    pub fn is_concrete(&self, name: &str) -> bool {
        self.node_type(name).is_some_and(|t| !t.is_abstract)
    }
}
