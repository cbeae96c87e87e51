//! Evolution patterns: workflows mixing automated steps with decisions taken
//! by the architect, ending in a style check.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::analysis::{static_findings, StaticFinding};
use crate::cosa::{
    self, check_format, cosa_type_graph, rules, to_canonical_json, ty, ArchError, Architecture, ComponentPath,
    FormatError,
};
use crate::evolution::{move_in, OperationDescriptor};
use crate::graph::matching::Bindings;
use crate::graph::{ConformanceReport, Value};
use crate::rewrite::{apply, find_matches, Repetition, RuleSequence, SequenceItem};
use crate::styles::{check_style, style_by_name, CLIENT_SERVER};

pub const DECISIONS_FORMAT: &str = "archevol/decisions@1";

/// What an answer to a decision must look like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionKind {
    /// `{"server": name, "clients": [name, ...]}` with at least one client.
    StyleNames,
    /// `[{"component": name, "target": name}, ...]` over top-level components.
    Assignment,
    /// A list of operation descriptors, possibly empty.
    Operations,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decision {
    pub kind: DecisionKind,
    pub prompt: String,
}

/// Work done by the engine in an automated step. Actions naming a decision
/// act on the answer given to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum Action {
    /// Create the server and clients named in a style-names answer.
    CreateStyleComponents { decision: String },
    /// Move each assigned component into its container, server first.
    MoveAssigned { decision: String, names: String },
    /// Run the operations given in an operations answer.
    RunOperations { decision: String },
    /// Run a fixed operation batch.
    Operations { operations: Vec<OperationDescriptor> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Step {
    Automated {
        id: String,
        #[serde(flatten)]
        action: Action,
        /// Rule-level counterpart, used to check the step ordering.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rules: Option<String>,
    },
    Decision {
        id: String,
        #[serde(flatten)]
        decision: Decision,
    },
    Check {
        id: String,
        style: String,
    },
}

impl Step {
    pub fn id(&self) -> &str {
        match self {
            Step::Automated { id, .. } | Step::Decision { id, .. } | Step::Check { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvolutionPattern {
    pub name: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub style: Option<String>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern `{pattern}`: duplicate step id `{id}`")]
    DuplicateStep { pattern: String, id: String },
    #[error("pattern `{pattern}`: step `{step}` refers to unknown decision `{decision}`")]
    UnknownDecision { pattern: String, step: String, decision: String },
    #[error("pattern `{pattern}` targets style `{style}` but does not end with a check of it")]
    MissingCheck { pattern: String, style: String },
    #[error("pattern `{pattern}`: unknown style `{style}`")]
    UnknownStyle { pattern: String, style: String },
    #[error("pattern `{pattern}`: bad rule sequence in step `{step}`: {message}")]
    Sequence { pattern: String, step: String, message: String },
    #[error("pattern `{pattern}`: automated steps are not enabled: {}", .findings.iter().map(|f| f.message.as_str()).collect::<Vec<_>>().join("; "))]
    NotEnabled { pattern: String, findings: Vec<StaticFinding> },
}

/// Node types of an architecture before any style is introduced.
pub fn plain_types() -> Vec<String> {
    [
        ty::COMPONENT,
        ty::CONFIGURATION,
        ty::PROV_PORT,
        ty::REQ_PORT,
        ty::CONNECTOR,
        ty::PROV_ROLE,
        ty::REQ_ROLE,
    ]
    .map(String::from)
    .to_vec()
}

impl EvolutionPattern {
    pub fn step(&self, id: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.id() == id)
    }

    fn decision_before(&self, at: usize, id: &str) -> bool {
        self.steps[..at]
            .iter()
            .any(|s| matches!(s, Step::Decision { id: d, .. } if d == id))
    }

    /// The rule counterparts of the automated steps, in order.
    pub fn rule_sequence(&self) -> Result<Option<RuleSequence>, PatternError> {
        let parts: Vec<(&str, &str)> = self
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::Automated { id, rules: Some(r), .. } => Some((id.as_str(), r.as_str())),
                _ => None,
            })
            .collect();
        if parts.is_empty() {
            return Ok(None);
        }
        for (id, text) in &parts {
            RuleSequence::parse(text, rules::rule_by_name).map_err(|e| PatternError::Sequence {
                pattern: self.name.clone(),
                step: id.to_string(),
                message: e.to_string(),
            })?;
        }
        let text = parts.iter().map(|(_, t)| *t).collect::<Vec<_>>().join("; ");
        RuleSequence::parse(&text, rules::rule_by_name)
            .map(Some)
            .map_err(|e| PatternError::Sequence {
                pattern: self.name.clone(),
                step: parts[0].0.to_owned(),
                message: e.to_string(),
            })
    }

    /// Structural checks, plus the static enabling check of the automated
    /// steps' rule counterparts over a plain architecture.
    pub fn validate(&self) -> Result<(), PatternError> {
        let mut ids = BTreeSet::new();
        for (i, s) in self.steps.iter().enumerate() {
            if !ids.insert(s.id()) {
                return Err(PatternError::DuplicateStep {
                    pattern: self.name.clone(),
                    id: s.id().to_owned(),
                });
            }
            if let Step::Automated { id, action, .. } = s {
                let refs: Vec<&String> = match action {
                    Action::CreateStyleComponents { decision } | Action::RunOperations { decision } => vec![decision],
                    Action::MoveAssigned { decision, names } => vec![decision, names],
                    Action::Operations { .. } => vec![],
                };
                for d in refs {
                    if !self.decision_before(i, d) {
                        return Err(PatternError::UnknownDecision {
                            pattern: self.name.clone(),
                            step: id.clone(),
                            decision: d.clone(),
                        });
                    }
                }
            }
            if let Step::Check { style, .. } = s {
                if style_by_name(style).is_none() {
                    return Err(PatternError::UnknownStyle {
                        pattern: self.name.clone(),
                        style: style.clone(),
                    });
                }
            }
        }
        if let Some(style) = &self.style {
            if !matches!(self.steps.last(), Some(Step::Check { style: s, .. }) if s == style) {
                return Err(PatternError::MissingCheck {
                    pattern: self.name.clone(),
                    style: style.clone(),
                });
            }
        }
        if let Some(seq) = self.rule_sequence()? {
            // Every rule named by a step must be enabled by the time the
            // step runs, so repetitions are checked like single items.
            let items = seq
                .items()
                .iter()
                .map(|i| SequenceItem {
                    rule: i.rule.clone(),
                    repetition: Repetition::Once,
                })
                .collect();
            let once = RuleSequence::new(items).expect("nonempty");
            let findings = static_findings(&once, cosa_type_graph(), &plain_types());
            if !findings.is_empty() {
                return Err(PatternError::NotEnabled {
                    pattern: self.name.clone(),
                    findings,
                });
            }
        }
        Ok(())
    }
}

/// Introduces the client-server style: name the server and clients, create
/// them, assign existing components, move them in, run optional extra
/// operations and check the result.
pub fn client_server_pattern() -> EvolutionPattern {
    let automated = |id: &str, action: Action, rules: Option<&str>| Step::Automated {
        id: id.to_owned(),
        action,
        rules: rules.map(str::to_owned),
    };
    let decision = |id: &str, kind, prompt: &str| Step::Decision {
        id: id.to_owned(),
        decision: Decision {
            kind,
            prompt: prompt.to_owned(),
        },
    };
    EvolutionPattern {
        name: CLIENT_SERVER.to_owned(),
        description: "Introduce one server and one or more clients, and move the existing components into them"
            .to_owned(),
        style: Some(CLIENT_SERVER.to_owned()),
        steps: vec![
            decision("names", DecisionKind::StyleNames, "Name the server and the clients (at least one)."),
            automated(
                "create",
                Action::CreateStyleComponents {
                    decision: "names".into(),
                },
                Some("CreateServer; CreateClient; (CreateClient)*"),
            ),
            decision(
                "assignment",
                DecisionKind::Assignment,
                "Assign each top-level component to the server or to a client.",
            ),
            automated(
                "move",
                Action::MoveAssigned {
                    decision: "assignment".into(),
                    names: "names".into(),
                },
                Some(
                    "(MoveComponentToServer)*; (DelegateProvPortToServer)*; (DelegateReqPortToServer)*; \
                     (MoveComponentToClient)*; (DelegateProvPortToClient)*; (DelegateReqPortToClient)*",
                ),
            ),
            decision(
                "extra",
                DecisionKind::Operations,
                "List further operations (split, merge, move, delegate), or none.",
            ),
            automated(
                "apply",
                Action::RunOperations {
                    decision: "extra".into(),
                },
                None,
            ),
            Step::Check {
                id: "check".into(),
                style: CLIENT_SERVER.to_owned(),
            },
        ],
    }
}

pub fn builtin_patterns() -> Vec<EvolutionPattern> {
    vec![client_server_pattern()]
}

pub fn pattern_by_name(name: &str) -> Option<EvolutionPattern> {
    builtin_patterns().into_iter().find(|p| p.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleNames {
    pub server: String,
    pub clients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub component: String,
    pub target: String,
}

fn parse<T: for<'de> Deserialize<'de>>(kind: &str, answer: &Json) -> Result<T, String> {
    serde_json::from_value(answer.clone()).map_err(|e| format!("malformed {kind} answer: {e}"))
}

fn valid_name(s: &str) -> bool {
    s.parse::<ComponentPath>().is_ok_and(|p| p.segments().len() == 1)
}

/// Validates an answer against the decision kind and the current run.
fn check_answer(kind: DecisionKind, answer: &Json, a: &Architecture, names: Option<&StyleNames>) -> Result<(), String> {
    match kind {
        DecisionKind::StyleNames => {
            let n: StyleNames = parse("style-names", answer)?;
            if n.clients.is_empty() {
                return Err("at least one client is required".into());
            }
            let mut seen = BTreeSet::new();
            for x in std::iter::once(&n.server).chain(&n.clients) {
                if !valid_name(x) {
                    return Err(format!("`{x}` is not a valid component name"));
                }
                if !seen.insert(x) {
                    return Err(format!("`{x}` is named twice"));
                }
                if a.components.iter().any(|c| &c.name == x) {
                    return Err(format!("a top-level component `{x}` already exists"));
                }
            }
            Ok(())
        }
        DecisionKind::Assignment => {
            let xs: Vec<Assignment> = parse("assignment", answer)?;
            let n = names.ok_or("no server and clients were named")?;
            let mut seen = BTreeSet::new();
            for x in &xs {
                if !seen.insert(&x.component) {
                    return Err(format!("`{}` is assigned twice", x.component));
                }
                if x.target != n.server && !n.clients.contains(&x.target) {
                    return Err(format!("`{}` is neither the server nor a client", x.target));
                }
                if x.component == n.server || n.clients.contains(&x.component) {
                    return Err(format!("`{}` cannot be assigned", x.component));
                }
                if !a.components.iter().any(|c| c.name == x.component) {
                    return Err(format!("`{}` is not a top-level component", x.component));
                }
            }
            Ok(())
        }
        DecisionKind::Operations => {
            let ops: Vec<OperationDescriptor> = parse("operations", answer)?;
            for op in &ops {
                op.check().map_err(|e| e.to_string())?;
            }
            Ok(())
        }
    }
}

/// One entry of a decision script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedDecision {
    pub step: String,
    pub answer: Json,
}

/// Answers for a pattern's decisions, for headless runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionScript {
    pub pattern: String,
    pub decisions: Vec<ScriptedDecision>,
}

#[derive(Serialize, Deserialize)]
struct ScriptDoc {
    format: String,
    #[serde(flatten)]
    script: DecisionScript,
}

impl DecisionScript {
    pub fn to_document(&self) -> String {
        to_canonical_json(&ScriptDoc {
            format: DECISIONS_FORMAT.to_owned(),
            script: self.clone(),
        })
    }

    pub fn from_document(text: &str) -> Result<DecisionScript, FormatError> {
        let value: Json = serde_json::from_str(text)?;
        check_format(&value, DECISIONS_FORMAT)?;
        let doc: ScriptDoc = serde_json::from_value(value)?;
        Ok(doc.script)
    }
}

/// Source of answers for decision steps.
pub trait DecisionProvider {
    /// `Ok(None)` suspends the run until an answer is submitted; `Err`
    /// fails it.
    fn answer(&mut self, step: &str, decision: &Decision) -> Result<Option<Json>, String>;
}

impl DecisionProvider for DecisionScript {
    fn answer(&mut self, step: &str, _: &Decision) -> Result<Option<Json>, String> {
        self.decisions
            .iter()
            .find(|d| d.step == step)
            .map(|d| Some(d.answer.clone()))
            .ok_or_else(|| format!("the script has no answer for step `{step}`"))
    }
}

/// Provider that never answers, leaving the run awaiting a decision.
pub struct Interactive;

impl DecisionProvider for Interactive {
    fn answer(&mut self, _: &str, _: &Decision) -> Result<Option<Json>, String> {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunState {
    AwaitingDecision,
    Running,
    Finished,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternRun {
    pub pattern: String,
    pub state: RunState,
    /// Index of the step to run next, or of the failing step.
    pub current: usize,
    pub architecture: Architecture,
    pub answers: BTreeMap<String, Json>,
    pub trace: Vec<TraceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_report: Option<ConformanceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubmitError {
    #[error("the run is not awaiting a decision")]
    NotAwaiting,
    #[error("the run awaits step `{expected}`, not `{got}`")]
    WrongStep { expected: String, got: String },
}

/// A decision awaiting an answer. For assignments, `components` lists the
/// assignable top-level components and `targets` the server and clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PendingDecision {
    pub step: String,
    pub kind: DecisionKind,
    pub prompt: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<String>,
}

impl PatternRun {
    pub fn new(p: &EvolutionPattern, a: Architecture) -> PatternRun {
        PatternRun {
            pattern: p.name.clone(),
            state: RunState::Running,
            current: 0,
            architecture: a,
            answers: BTreeMap::new(),
            trace: Vec::new(),
            final_report: None,
            error: None,
        }
    }

    /// Id of the step the run is waiting on or failed at.
    pub fn current_step<'a>(&self, p: &'a EvolutionPattern) -> Option<&'a Step> {
        p.steps.get(self.current)
    }

    /// The decision the run waits on, with the names an answer may use.
    pub fn pending(&self, p: &EvolutionPattern) -> Option<PendingDecision> {
        if self.state != RunState::AwaitingDecision {
            return None;
        }
        let Some(Step::Decision { id, decision }) = self.current_step(p) else {
            return None;
        };
        let (components, targets) = match (decision.kind, self.names(p)) {
            (DecisionKind::Assignment, Some(n)) => {
                let targets: Vec<String> = std::iter::once(n.server.clone()).chain(n.clients.clone()).collect();
                let components = self
                    .architecture
                    .components
                    .iter()
                    .map(|c| c.name.clone())
                    .filter(|c| !targets.contains(c))
                    .collect();
                (components, targets)
            }
            _ => (Vec::new(), Vec::new()),
        };
        Some(PendingDecision {
            step: id.clone(),
            kind: decision.kind,
            prompt: decision.prompt.clone(),
            components,
            targets,
        })
    }

    fn fail(&mut self, step: &str, message: String) {
        self.state = RunState::Failed;
        self.error = Some(format!("step `{step}`: {message}"));
    }

    fn names(&self, p: &EvolutionPattern) -> Option<StyleNames> {
        p.steps.iter().find_map(|s| match s {
            Step::Decision { id, decision } if decision.kind == DecisionKind::StyleNames => {
                self.answers.get(id).and_then(|v| serde_json::from_value(v.clone()).ok())
            }
            _ => None,
        })
    }

    /// Records an answer for the awaited decision and continues.
    pub fn submit(
        &mut self,
        p: &EvolutionPattern,
        step: &str,
        answer: Json,
        provider: &mut dyn DecisionProvider,
    ) -> Result<(), SubmitError> {
        if self.state != RunState::AwaitingDecision {
            return Err(SubmitError::NotAwaiting);
        }
        let expected = p.steps[self.current].id();
        if expected != step {
            return Err(SubmitError::WrongStep {
                expected: expected.to_owned(),
                got: step.to_owned(),
            });
        }
        self.state = RunState::Running;
        self.accept(p, answer);
        self.drive(p, provider);
        Ok(())
    }

    fn accept(&mut self, p: &EvolutionPattern, answer: Json) {
        let Step::Decision { id, decision } = &p.steps[self.current] else {
            unreachable!("answers go to decision steps")
        };
        let names = self.names(p);
        match check_answer(decision.kind, &answer, &self.architecture, names.as_ref()) {
            Ok(()) => {
                self.trace.push(TraceEntry {
                    step: id.clone(),
                    detail: format!("answer {answer}"),
                });
                self.answers.insert(id.clone(), answer);
                self.current += 1;
            }
            Err(e) => self.fail(id, format!("invalid answer: {e}")),
        }
    }

    /// Runs steps until the pattern ends, fails, or waits for an answer.
    pub fn drive(&mut self, p: &EvolutionPattern, provider: &mut dyn DecisionProvider) {
        while self.state == RunState::Running {
            let Some(step) = p.steps.get(self.current) else {
                self.state = RunState::Finished;
                break;
            };
            match step {
                Step::Decision { id, decision } => match provider.answer(id, decision) {
                    Ok(Some(answer)) => self.accept(p, answer),
                    Ok(None) => self.state = RunState::AwaitingDecision,
                    Err(e) => self.fail(id, e),
                },
                Step::Automated { id, action, .. } => match self.perform(action) {
                    Ok((a, entries)) => {
                        self.architecture = a;
                        self.trace.extend(entries.into_iter().map(|detail| TraceEntry {
                            step: id.clone(),
                            detail,
                        }));
                        self.current += 1;
                    }
                    Err(e) => self.fail(id, e),
                },
                Step::Check { id, style } => {
                    let report = style_by_name(style)
                        .ok_or_else(|| format!("unknown style `{style}`"))
                        .and_then(|s| check_style(&self.architecture, &s).map_err(|e| e.to_string()));
                    match report {
                        Ok(r) => {
                            self.trace.push(TraceEntry {
                                step: id.clone(),
                                detail: format!(
                                    "style {style}: {}",
                                    if r.ok {
                                        "conforms".to_owned()
                                    } else {
                                        format!("{} violations", r.violations.len())
                                    }
                                ),
                            });
                            self.final_report = Some(r);
                            self.current += 1;
                        }
                        Err(e) => self.fail(id, e),
                    }
                }
            }
        }
    }

    fn answer<T: for<'de> Deserialize<'de>>(&self, decision: &str) -> Result<T, String> {
        let v = self
            .answers
            .get(decision)
            .ok_or_else(|| format!("decision `{decision}` has no answer"))?;
        serde_json::from_value(v.clone()).map_err(|e| e.to_string())
    }

    /// Applies an automated action to a copy of the architecture.
    fn perform(&self, action: &Action) -> Result<(Architecture, Vec<String>), String> {
        let mut a = self.architecture.clone();
        let mut trace = Vec::new();
        match action {
            Action::CreateStyleComponents { decision } => {
                let n: StyleNames = self.answer(decision)?;
                a = apply_create(&a, rules::create_server(), &n.server)?;
                trace.push(format!("{} name={}", rules::CREATE_SERVER, n.server));
                for c in &n.clients {
                    a = apply_create(&a, rules::create_client(), c)?;
                    trace.push(format!("{} name={c}", rules::CREATE_CLIENT));
                }
            }
            Action::MoveAssigned { decision, names } => {
                let xs: Vec<Assignment> = self.answer(decision)?;
                let n: StyleNames = self.answer(names)?;
                let order = std::iter::once(&n.server).chain(&n.clients);
                for target in order {
                    for x in xs.iter().filter(|x| &x.target == target) {
                        let ev = move_in(&a, &ComponentPath::top(&x.component), &ComponentPath::top(target))
                            .map_err(|e| e.to_string())?;
                        a = ev.architecture;
                        trace.push(format!("moveIn {} parent={target}", x.component));
                    }
                }
            }
            Action::RunOperations { decision } => {
                let ops: Vec<OperationDescriptor> = self.answer(decision)?;
                a = run_operations(&a, &ops, &mut trace)?;
            }
            Action::Operations { operations } => {
                a = run_operations(&a, operations, &mut trace)?;
            }
        }
        Ok((a, trace))
    }
}

fn run_operations(
    a: &Architecture,
    ops: &[OperationDescriptor],
    trace: &mut Vec<String>,
) -> Result<Architecture, String> {
    let mut a = a.clone();
    for op in ops {
        a = op.apply(&a).map_err(|e| format!("{op}: {e}"))?.architecture;
        trace.push(op.to_string());
    }
    Ok(a)
}

/// Applies a creation rule with the given name and decodes the result.
fn apply_create(a: &Architecture, rule: crate::rewrite::Rule, name: &str) -> Result<Architecture, String> {
    let g = cosa::encode(a).map_err(|e: ArchError| e.to_string())?;
    let env: Bindings = [(rules::NAME_PARAM.to_owned(), Value::from(name))].into();
    let m = find_matches(&rule, &g, cosa_type_graph(), &env)
        .map_err(|e| e.to_string())?
        .into_iter()
        .next()
        .ok_or_else(|| format!("{} is not applicable", rule.name()))?;
    let h = apply(&rule, &g, &m).map_err(|e| e.to_string())?;
    let out = cosa::decode(&h, &a.name).map_err(|e| e.to_string())?;
    let report = cosa::validate(&out).map_err(|e| e.to_string())?;
    if !report.ok {
        return Err(format!("{} produced an invalid architecture", rule.name()));
    }
    Ok(out)
}

/// Runs a pattern to completion with `provider`. A provider that suspends
/// leaves the run awaiting a decision.
pub fn run_pattern(p: &EvolutionPattern, a: &Architecture, provider: &mut dyn DecisionProvider) -> PatternRun {
    let mut run = PatternRun::new(p, a.clone());
    if let Err(e) = p.validate() {
        run.fail(p.steps.first().map_or("", Step::id), e.to_string());
        return run;
    }
    if let Err(e) = a.validate() {
        run.fail(p.steps.first().map_or("", Step::id), format!("input architecture: {e}"));
        return run;
    }
    run.drive(p, provider);
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use serde_json::json;

    fn script(decisions: Json) -> DecisionScript {
        serde_json::from_value(json!({ "pattern": "client-server", "decisions": decisions })).unwrap()
    }

    #[test]
    fn builtin_pattern_is_valid() {
        client_server_pattern().validate().unwrap();
    }

    #[test]
    fn scripted_run_reproduces_the_fixture() {
        let mut s = DecisionScript::from_document(fixtures::ESHOP_DECISIONS).unwrap();
        let run = run_pattern(&client_server_pattern(), &fixtures::eshop(), &mut s);
        assert_eq!(run.state, RunState::Finished, "{:?}", run.error);
        assert!(run.final_report.as_ref().unwrap().ok);
        assert_eq!(run.architecture.to_canonical(), fixtures::ESHOP_CLIENT_SERVER);
    }

    #[test]
    fn zero_clients_rejected() {
        let mut s = script(json!([{ "step": "names", "answer": { "server": "S", "clients": [] } }]));
        let run = run_pattern(&client_server_pattern(), &fixtures::eshop(), &mut s);
        assert_eq!(run.state, RunState::Failed);
        assert_eq!(run.current, 0);
        assert!(run.error.unwrap().contains("at least one client"));
    }

    #[test]
    fn empty_architecture_fails_the_check() {
        let mut s = script(json!([
            { "step": "names", "answer": { "server": "S", "clients": ["C"] } },
            { "step": "assignment", "answer": [] },
            { "step": "extra", "answer": [] },
        ]));
        let empty = Architecture::from_document(fixtures::EMPTY).unwrap();
        let run = run_pattern(&client_server_pattern(), &empty, &mut s);
        assert_eq!(run.state, RunState::Finished);
        let report = run.final_report.unwrap();
        assert!(!report.ok);
        assert!(report.with_code("CS-1").next().is_some(), "{:?}", report.violations);
    }

    #[test]
    fn missing_answer_keeps_the_snapshot() {
        let mut s = script(json!([{ "step": "names", "answer": { "server": "Server", "clients": ["Client"] } }]));
        let run = run_pattern(&client_server_pattern(), &fixtures::eshop(), &mut s);
        assert_eq!(run.state, RunState::Failed);
        assert_eq!(run.current, 2);
        let names: Vec<&str> = run.architecture.components.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["Product", "Customer", "Order", "Server", "Client"]);
    }

    #[test]
    fn failing_operation_is_atomic() {
        let mut s = DecisionScript::from_document(fixtures::ESHOP_DECISIONS).unwrap();
        let extra = s.decisions.iter_mut().find(|d| d.step == "extra").unwrap();
        extra.answer.as_array_mut().unwrap().push(json!({ "name": "moveOut", "context": "Server" }));
        let p = client_server_pattern();
        let run = run_pattern(&p, &fixtures::eshop(), &mut s);
        assert_eq!(run.state, RunState::Failed);
        assert_eq!(run.current_step(&p).unwrap().id(), "apply");
        let names: Vec<&str> = run.architecture.components[1].children().iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["Product", "Customer"], "no extra operation was kept");
        assert!(run.architecture.validate().is_ok());
    }

    #[test]
    fn unknown_assignment_target_rejected() {
        let mut s = script(json!([
            { "step": "names", "answer": { "server": "Server", "clients": ["Client"] } },
            { "step": "assignment", "answer": [{ "component": "Order", "target": "Mainframe" }] },
        ]));
        let run = run_pattern(&client_server_pattern(), &fixtures::eshop(), &mut s);
        assert_eq!(run.state, RunState::Failed);
        assert!(run.error.unwrap().contains("Mainframe"));
    }

    #[test]
    fn interactive_run_suspends_and_resumes() {
        let p = client_server_pattern();
        let full = DecisionScript::from_document(fixtures::ESHOP_DECISIONS).unwrap();
        let mut run = run_pattern(&p, &fixtures::eshop(), &mut Interactive);
        for d in &full.decisions {
            assert_eq!(run.state, RunState::AwaitingDecision);
            assert_eq!(
                run.submit(&p, "nope", json!(null), &mut Interactive),
                Err(SubmitError::WrongStep {
                    expected: d.step.clone(),
                    got: "nope".into()
                })
            );
            run.submit(&p, &d.step, d.answer.clone(), &mut Interactive).unwrap();
        }
        assert_eq!(run.state, RunState::Finished);
        assert_eq!(run.architecture.to_canonical(), fixtures::ESHOP_CLIENT_SERVER);
        assert_eq!(
            run.submit(&p, "names", json!(null), &mut Interactive),
            Err(SubmitError::NotAwaiting)
        );
    }

    #[test]
    fn pending_assignment_lists_components_and_targets() {
        let p = client_server_pattern();
        let mut run = run_pattern(&p, &fixtures::eshop(), &mut Interactive);
        assert_eq!(run.pending(&p).unwrap().kind, DecisionKind::StyleNames);
        let names = json!({"server": "Server", "clients": ["Client"]});
        run.submit(&p, "names", names, &mut Interactive).unwrap();
        let pending = run.pending(&p).unwrap();
        assert_eq!(pending.step, "assignment");
        assert_eq!(pending.components, ["Product", "Customer", "Order"]);
        assert_eq!(pending.targets, ["Server", "Client"]);
    }

    #[test]
    fn misordered_pattern_is_refused() {
        let mut p = client_server_pattern();
        let create = p.steps.remove(1);
        p.steps.insert(3, create);
        if let Step::Automated { rules, .. } = &mut p.steps[2] {
            *rules = Some("(MoveComponentToServer)*".into());
        }
        match p.validate() {
            Err(PatternError::NotEnabled { findings, .. }) => {
                assert!(findings.iter().any(|f| f.node_type == ty::SERVER))
            }
            other => panic!("expected a no-enabler refusal, got {other:?}"),
        }
    }

    #[test]
    fn script_document_round_trip() {
        let s = DecisionScript::from_document(fixtures::ESHOP_DECISIONS).unwrap();
        assert_eq!(s.to_document(), fixtures::ESHOP_DECISIONS);
    }
}
