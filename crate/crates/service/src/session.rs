use archevol_core::cosa::{connects_to, Architecture};
use archevol_core::evolution::{EvolutionError, OperationDescriptor};
use archevol_core::patterns::{
    pattern_by_name, run_pattern, EvolutionPattern, Interactive, PatternRun, PendingDecision, RunState, SubmitError,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::ApiError;

/// One architecture under edit, with an optional pattern run driving it.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub architecture: Architecture,
    pub revision: u64,
    pub run: Option<ActiveRun>,
}

#[derive(Debug, Clone)]
pub struct ActiveRun {
    pub pattern: EvolutionPattern,
    pub run: PatternRun,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Link {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub session_id: String,
    pub revision: u64,
    pub document: Value,
    pub connects_to: Vec<Link>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunView<'a> {
    pub session_id: &'a str,
    pub revision: u64,
    #[serde(flatten)]
    pub run: &'a PatternRun,
    /// Id of the step the run waits on or failed at.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pending: Option<PendingDecision>,
}

fn evolution_error(e: EvolutionError) -> ApiError {
    match e {
        EvolutionError::Descriptor(m) => ApiError::bad_request(m),
        EvolutionError::NotFound { .. } => ApiError::unprocessable(e.to_string()),
        other => ApiError::unprocessable(other.to_string()),
    }
}

impl Session {
    pub fn new(id: String, architecture: Architecture) -> Self {
        Session {
            id,
            architecture,
            revision: 0,
            run: None,
        }
    }

    pub fn snapshot(&self) -> Result<Snapshot, ApiError> {
        let document = serde_json::from_str(&self.architecture.to_canonical()).expect("canonical documents parse");
        let links = connects_to(&self.architecture).map_err(|e| ApiError::unprocessable(e.to_string()))?;
        Ok(Snapshot {
            session_id: self.id.clone(),
            revision: self.revision,
            document,
            connects_to: links
                .into_iter()
                .map(|(s, t)| Link {
                    from: s.to_string(),
                    to: t.to_string(),
                })
                .collect(),
        })
    }

    fn awaiting_run(&self) -> bool {
        self.run.as_ref().is_some_and(|r| r.run.state == RunState::AwaitingDecision)
    }

    /// Applies an operation if `expected` is the current revision.
    pub fn apply(&mut self, expected: u64, op: &OperationDescriptor) -> Result<Value, ApiError> {
        if expected != self.revision {
            return Err(ApiError::conflict(format!(
                "stale revision {expected}, the session is at {}",
                self.revision
            ))
            .with_details(json!({"revision": self.revision})));
        }
        if self.awaiting_run() {
            return Err(ApiError::conflict("a pattern run is waiting for a decision"));
        }
        let ev = op.apply(&self.architecture).map_err(evolution_error)?;
        self.architecture = ev.architecture;
        self.revision += 1;
        let relocated: serde_json::Map<String, Value> = ev
            .relocated
            .iter()
            .map(|(old, new)| (old.to_string(), Value::String(new.to_string())))
            .collect();
        let mut out = serde_json::to_value(self.snapshot()?).expect("snapshots serialize");
        out["relocated"] = Value::Object(relocated);
        Ok(out)
    }

    pub fn start(&mut self, name: &str) -> Result<(), ApiError> {
        let pattern = pattern_by_name(name).ok_or_else(|| ApiError::not_found(format!("no pattern `{name}`")))?;
        if self.awaiting_run() {
            return Err(ApiError::conflict("a pattern run is already waiting for a decision"));
        }
        let run = run_pattern(&pattern, &self.architecture, &mut Interactive);
        if run.state == RunState::Failed {
            return Err(ApiError::unprocessable(run.error.unwrap_or_default()));
        }
        self.architecture = run.architecture.clone();
        self.revision += 1;
        self.run = Some(ActiveRun { pattern, run });
        Ok(())
    }

    /// Answers the awaited decision. A failing answer leaves the run as it was.
    pub fn decide(&mut self, step: &str, answer: Value) -> Result<(), ApiError> {
        let active = self.run.as_ref().ok_or_else(|| ApiError::not_found("no pattern run"))?;
        if active.pattern.step(step).is_none() {
            return Err(ApiError::not_found(format!("no step `{step}` in `{}`", active.pattern.name)));
        }
        if active.run.answers.contains_key(step) {
            return Err(ApiError::conflict(format!("step `{step}` is already answered")));
        }
        let mut run = active.run.clone();
        run.submit(&active.pattern, step, answer, &mut Interactive)
            .map_err(|e| match e {
                SubmitError::NotAwaiting | SubmitError::WrongStep { .. } => ApiError::conflict(e.to_string()),
            })?;
        if run.state == RunState::Failed {
            return Err(ApiError::unprocessable(run.error.unwrap_or_default()));
        }
        self.architecture = run.architecture.clone();
        self.revision += 1;
        self.run.as_mut().expect("checked above").run = run;
        Ok(())
    }

    pub fn run_view(&self) -> Result<RunView<'_>, ApiError> {
        let active = self.run.as_ref().ok_or_else(|| ApiError::not_found("no pattern run"))?;
        let run = &active.run;
        Ok(RunView {
            session_id: &self.id,
            revision: self.revision,
            run,
            step: run.current_step(&active.pattern).map(|s| s.id()),
            pending: run.pending(&active.pattern),
        })
    }
}
