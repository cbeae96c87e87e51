//! Critical pair analysis between rules and applicability analysis of rule
//! sequences.

mod cpa;
mod overlap;
mod sequence;

pub use cpa::{
    cpa_matrix, critical_pairs, sequential_dependencies, ConflictKind, CpaCell, CpaError, CpaMatrix, CpaOptions,
    CriticalPair, CPA_FORMAT, DEFAULT_MAX_OVERLAP_NODES,
};
pub use overlap::{for_each_overlap, Overlap};
pub use sequence::{analyze_sequence, static_findings, DynamicOutcome, FindingKind, SequenceReport, StaticFinding};
