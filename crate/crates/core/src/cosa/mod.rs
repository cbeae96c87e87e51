//! Component-connector architectures: the domain model, its graph encoding
//! over the metamodel, base invariants, port dependencies and file format.

mod codec;
mod deps;
mod format;
mod metamodel;
mod model;
pub mod rules;

pub use codec::{decode, decode_over, encode, encode_indexed, DecodeError, Encoding};
pub use deps::{connects_to, dependency_reachability, direct_dependencies, restrict_pairs};
pub use format::{check_format, to_canonical_json, FormatError, ARCHITECTURE_FORMAT};
pub(crate) use metamodel::Pat;
pub use metamodel::{base_invariants, check_graph, cosa_type_graph, ty, NAME};
pub use model::{
    ArchError, Architecture, Attachment, Binding, Component, ComponentKind, ComponentPath, Connector,
    Port, PortDirection, PortRef, RefError, Role, RoleRef, Uses,
};

use crate::graph::ConformanceReport;

/// Encodes and checks an architecture against the metamodel and the base
/// invariants.
pub fn validate(a: &Architecture) -> Result<ConformanceReport, ArchError> {
    let g = encode(a)?;
    Ok(check_graph(&g, cosa_type_graph(), &[]).expect("metamodel types are known"))
}
