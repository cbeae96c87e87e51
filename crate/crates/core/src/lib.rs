//! Architecture evolution on typed attributed graphs.
//!
//! Architectures are encoded as graphs typed over a COSA-like metamodel,
//! evolved with transformation rules and dependency-preserving operations,
//! and analyzed for rule conflicts, dependencies and style conformance.

pub mod graph;
pub mod rewrite;
pub mod cosa;
pub mod analysis;
pub mod styles;
pub mod evolution;
pub mod patterns;
pub mod fixtures;
