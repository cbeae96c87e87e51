use std::fmt;

use serde::{Deserialize, Serialize};

use super::{apply_traced, find_matches, Match, RewriteError, Rule};
use crate::graph::matching::Bindings;
use crate::graph::{HostGraph, TypeGraph};

/// Default ceiling on rule applications within one sequence run.
pub const DEFAULT_MAX_REWRITES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repetition {
    Once,
    Star,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceItem {
    pub rule: Rule,
    pub repetition: Repetition,
}

/// A nonempty ordered program of rules, each applied once or as long as a
/// match exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSequence {
    items: Vec<SequenceItem>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("empty rule sequence")]
    Empty,
    #[error("unknown rule `{0}` in sequence")]
    UnknownRule(String),
    #[error("malformed sequence item `{0}`")]
    Malformed(String),
    #[error("item {position} (`{rule}`) has no match")]
    NoMatch { position: usize, rule: String },
    #[error("item {position} (`{rule}`): chooser declined a mandatory application")]
    Declined { position: usize, rule: String },
    #[error("item {position} (`{rule}`) exceeded the ceiling of {limit} applications")]
    Ceiling {
        position: usize,
        rule: String,
        limit: usize,
    },
    #[error("item {position}: {source}")]
    Rewrite {
        position: usize,
        #[source]
        source: RewriteError,
    },
}

impl SequenceError {
    /// Index of the failing item, when the failure happened while running.
    pub fn position(&self) -> Option<usize> {
        match self {
            SequenceError::NoMatch { position, .. }
            | SequenceError::Declined { position, .. }
            | SequenceError::Ceiling { position, .. }
            | SequenceError::Rewrite { position, .. } => Some(*position),
            _ => None,
        }
    }
}

impl RuleSequence {
    pub fn new(items: Vec<SequenceItem>) -> Result<Self, SequenceError> {
        if items.is_empty() {
            return Err(SequenceError::Empty);
        }
        Ok(RuleSequence { items })
    }

    pub fn items(&self) -> &[SequenceItem] {
        &self.items
    }

    /// Parses `A; (B)*; C*` against a rule lookup.
    pub fn parse(text: &str, lookup: impl Fn(&str) -> Option<Rule>) -> Result<Self, SequenceError> {
        let mut items = Vec::new();
        for raw in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (body, repetition) = match raw.strip_suffix('*') {
                Some(b) => (b.trim(), Repetition::Star),
                None => (raw, Repetition::Once),
            };
            let name = match body.strip_prefix('(') {
                Some(inner) => inner
                    .strip_suffix(')')
                    .ok_or_else(|| SequenceError::Malformed(raw.to_owned()))?
                    .trim(),
                None => body,
            };
            if name.is_empty() || name.contains(|c: char| c.is_whitespace() || "()*".contains(c)) {
                return Err(SequenceError::Malformed(raw.to_owned()));
            }
            let rule = lookup(name).ok_or_else(|| SequenceError::UnknownRule(name.to_owned()))?;
            items.push(SequenceItem { rule, repetition });
        }
        RuleSequence::new(items)
    }
}

impl fmt::Display for RuleSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .items
            .iter()
            .map(|i| match i.repetition {
                Repetition::Once => i.rule.name().to_owned(),
                Repetition::Star => format!("({})*", i.rule.name()),
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// What to do with the matches of the current item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Take(usize),
    /// Stop repeating a star item (a once item treats this as an error).
    Stop,
}

pub trait MatchChooser {
    fn choose(&mut self, rule: &Rule, matches: &[Match], host: &HostGraph) -> Choice;
}

/// Always takes the first match in canonical order.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstMatch;

impl MatchChooser for FirstMatch {
    fn choose(&mut self, _: &Rule, _: &[Match], _: &HostGraph) -> Choice {
        Choice::Take(0)
    }
}

impl<F> MatchChooser for F
where
    F: FnMut(&Rule, &[Match], &HostGraph) -> Choice,
{
    fn choose(&mut self, rule: &Rule, matches: &[Match], host: &HostGraph) -> Choice {
        self(rule, matches, host)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub position: usize,
    pub rule: String,
    #[serde(rename = "match")]
    pub match_summary: String,
    pub pre: String,
    pub post: String,
}

/// Chronological record of rule applications.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationTrace {
    pub steps: Vec<TraceStep>,
}

/// Runs the sequence. `max_rewrites` bounds the total number of applications.
pub fn apply_sequence(
    seq: &RuleSequence,
    host: &HostGraph,
    tg: &TypeGraph,
    chooser: &mut dyn MatchChooser,
    bindings: &Bindings,
    max_rewrites: usize,
) -> Result<(HostGraph, ApplicationTrace), (SequenceError, ApplicationTrace)> {
    let mut g = host.clone();
    let mut trace = ApplicationTrace::default();
    let mut count = 0usize;
    for (position, item) in seq.items.iter().enumerate() {
        let rule = &item.rule;
        let fail = |e: SequenceError, trace: ApplicationTrace| Err((e, trace));
        loop {
            let matches = match find_matches(rule, &g, tg, bindings) {
                Ok(m) => m,
                Err(source) => return fail(SequenceError::Rewrite { position, source }, trace),
            };
            if matches.is_empty() {
                if item.repetition == Repetition::Once {
                    return fail(
                        SequenceError::NoMatch {
                            position,
                            rule: rule.name().to_owned(),
                        },
                        trace,
                    );
                }
                break;
            }
            let idx = match chooser.choose(rule, &matches, &g) {
                Choice::Take(i) if i < matches.len() => i,
                Choice::Take(_) | Choice::Stop => {
                    if item.repetition == Repetition::Once {
                        return fail(
                            SequenceError::Declined {
                                position,
                                rule: rule.name().to_owned(),
                            },
                            trace,
                        );
                    }
                    break;
                }
            };
            if count >= max_rewrites {
                return fail(
                    SequenceError::Ceiling {
                        position,
                        rule: rule.name().to_owned(),
                        limit: max_rewrites,
                    },
                    trace,
                );
            }
            let m = &matches[idx];
            let next = match apply_traced(rule, &g, m) {
                Ok(a) => a.graph,
                Err(source) => return fail(SequenceError::Rewrite { position, source }, trace),
            };
            count += 1;
            trace.steps.push(TraceStep {
                position,
                rule: rule.name().to_owned(),
                match_summary: m.summary(&g),
                pre: g.digest(),
                post: next.digest(),
            });
            g = next;
            if item.repetition == Repetition::Once {
                break;
            }
        }
    }
    Ok((g, trace))
}
