use serde::Serialize;

use crate::graph::matching::Bindings;
use crate::graph::{HostGraph, TypeGraph};
use crate::rewrite::{apply_sequence, ApplicationTrace, FirstMatch, Repetition, RuleSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// No assumed type and no earlier creation can supply the node.
    NoEnabler,
    /// Only earlier creations supply the node, and a later item may delete them.
    ConsumedBeforeUse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StaticFinding {
    pub position: usize,
    pub rule: String,
    pub kind: FindingKind,
    pub node_type: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DynamicOutcome {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_position: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub trace: ApplicationTrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SequenceReport {
    pub sequence: String,
    pub findings: Vec<StaticFinding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamic: Option<DynamicOutcome>,
}

impl SequenceReport {
    /// No static finding and, when a host was given, a successful run.
    pub fn is_ok(&self) -> bool {
        self.findings.is_empty() && self.dynamic.as_ref().is_none_or(|d| d.applicable)
    }
}

/// Checks that each once item's LHS node types are available in any host
/// providing `assumed` types. Star items may apply zero times, so only once
/// items count as producers and only once items are checked.
pub fn static_findings(seq: &RuleSequence, tg: &TypeGraph, assumed: &[String]) -> Vec<StaticFinding> {
    let items = seq.items();
    let mut out = Vec::new();
    for (k, item) in items.iter().enumerate() {
        if item.repetition != Repetition::Once {
            continue;
        }
        let rule = &item.rule;
        let mut seen = Vec::new();
        for n in rule.lhs().nodes() {
            if seen.contains(&n.ty) {
                continue;
            }
            seen.push(n.ty.clone());
            if assumed.iter().any(|t| tg.is_subtype(t, &n.ty)) {
                continue;
            }
            let producers: Vec<usize> = (0..k)
                .filter(|&j| {
                    let r = &items[j].rule;
                    items[j].repetition == Repetition::Once
                        && r.created_nodes().any(|c| tg.is_subtype(&r.rhs().node(c).expect("rhs node").ty, &n.ty))
                })
                .collect();
            let Some(&last) = producers.last() else {
                out.push(StaticFinding {
                    position: k,
                    rule: rule.name().to_owned(),
                    kind: FindingKind::NoEnabler,
                    node_type: n.ty.clone(),
                    message: format!(
                        "item {k} (`{}`) needs a {} node that is neither assumed present nor created by an earlier item",
                        rule.name(),
                        n.ty
                    ),
                });
                continue;
            };
            let consumer = (last + 1..k).find(|&i| {
                let r = &items[i].rule;
                r.deleted_nodes()
                    .any(|d| tg.compatible(&r.lhs().node(d).expect("lhs node").ty, &n.ty))
            });
            if let Some(i) = consumer {
                out.push(StaticFinding {
                    position: k,
                    rule: rule.name().to_owned(),
                    kind: FindingKind::ConsumedBeforeUse,
                    node_type: n.ty.clone(),
                    message: format!(
                        "item {k} (`{}`) needs the {} node created by item {last}, which item {i} (`{}`) may delete",
                        rule.name(),
                        n.ty,
                        items[i].rule.name()
                    ),
                });
            }
        }
    }
    out
}

/// Static check, plus a concrete run on `host` when one is given.
pub fn analyze_sequence(
    seq: &RuleSequence,
    tg: &TypeGraph,
    assumed: &[String],
    host: Option<&HostGraph>,
    bindings: &Bindings,
    max_rewrites: usize,
) -> SequenceReport {
    let dynamic = host.map(|h| match apply_sequence(seq, h, tg, &mut FirstMatch, bindings, max_rewrites) {
        Ok((_, trace)) => DynamicOutcome {
            applicable: true,
            failing_position: None,
            error: None,
            trace,
        },
        Err((e, trace)) => DynamicOutcome {
            applicable: false,
            failing_position: e.position(),
            error: Some(e.to_string()),
            trace,
        },
    });
    SequenceReport {
        sequence: seq.to_string(),
        findings: static_findings(seq, tg, assumed),
        dynamic,
    }
}
