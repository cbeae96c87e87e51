use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    create, delegate_port, delete, merge_components, move_in, move_out, move_port, split_component, Evolution,
    EvolutionError,
};
use crate::cosa::{Architecture, ComponentKind, ComponentPath, PortRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OperationName {
    Create,
    Delete,
    MovePort,
    SplitComponent,
    MergeComponents,
    MoveIn,
    MoveOut,
    DelegatePort,
}

impl OperationName {
    pub const ALL: [OperationName; 8] = [
        OperationName::Create,
        OperationName::Delete,
        OperationName::MovePort,
        OperationName::SplitComponent,
        OperationName::MergeComponents,
        OperationName::MoveIn,
        OperationName::MoveOut,
        OperationName::DelegatePort,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperationName::Create => "create",
            OperationName::Delete => "delete",
            OperationName::MovePort => "movePort",
            OperationName::SplitComponent => "splitComponent",
            OperationName::MergeComponents => "mergeComponents",
            OperationName::MoveIn => "moveIn",
            OperationName::MoveOut => "moveOut",
            OperationName::DelegatePort => "delegatePort",
        }
    }

    /// What the context names, and the parameters (required, optional).
    pub fn signature(self) -> (&'static str, &'static [&'static str], &'static [&'static str]) {
        match self {
            OperationName::Create => ("parent component, empty for top level", &["name"], &["kind"]),
            OperationName::Delete => ("component", &[], &[]),
            OperationName::MovePort => ("port", &["target"], &[]),
            OperationName::SplitComponent => ("component", &["ports"], &["newName"]),
            OperationName::MergeComponents => ("first component", &["with", "newName"], &[]),
            OperationName::MoveIn => ("component", &["parent"], &[]),
            OperationName::MoveOut => ("component", &[], &[]),
            OperationName::DelegatePort => ("port", &[], &[]),
        }
    }
}

impl fmt::Display for OperationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A serializable request to run one evolution operation.
///
/// `context` is the element being modified (`A/B` or `A/B#port`); `params`
/// holds the remaining arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationDescriptor {
    pub name: OperationName,
    #[serde(default)]
    pub context: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

fn bad(msg: impl Into<String>) -> EvolutionError {
    EvolutionError::Descriptor(msg.into())
}

impl OperationDescriptor {
    pub fn new(name: OperationName, context: impl ToString) -> Self {
        OperationDescriptor {
            name,
            context: context.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn split(comp: &str, ports: &[&str], new_name: &str) -> Self {
        Self::new(OperationName::SplitComponent, comp)
            .with_param("ports", ports.to_vec())
            .with_param("newName", new_name)
    }

    pub fn move_in(comp: &str, parent: &str) -> Self {
        Self::new(OperationName::MoveIn, comp).with_param("parent", parent)
    }

    pub fn move_out(comp: &str) -> Self {
        Self::new(OperationName::MoveOut, comp)
    }

    pub fn delegate(port: &str) -> Self {
        Self::new(OperationName::DelegatePort, port)
    }

    fn text(&self, key: &str) -> Result<Option<&str>, EvolutionError> {
        match self.params.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(bad(format!("{}: parameter `{key}` must be a string", self.name))),
        }
    }

    fn required_text(&self, key: &str) -> Result<&str, EvolutionError> {
        self.text(key)?
            .ok_or_else(|| bad(format!("{}: missing parameter `{key}`", self.name)))
    }

    fn list(&self, key: &str) -> Result<Vec<String>, EvolutionError> {
        let err = || bad(format!("{}: parameter `{key}` must be a list of strings", self.name));
        match self.params.get(key) {
            None => Err(bad(format!("{}: missing parameter `{key}`", self.name))),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|x| x.as_str().map(str::to_owned).ok_or_else(err))
                .collect(),
            Some(_) => Err(err()),
        }
    }

    fn path(&self, s: &str) -> Result<ComponentPath, EvolutionError> {
        s.parse()
            .map_err(|e| bad(format!("{}: component reference `{s}`: {e}", self.name)))
    }

    fn port(&self) -> Result<PortRef, EvolutionError> {
        self.context
            .parse()
            .map_err(|e| bad(format!("{}: port reference `{}`: {e}", self.name, self.context)))
    }

    /// Checks that the parameters are complete, known and well typed.
    pub fn check(&self) -> Result<(), EvolutionError> {
        let (_, required, optional) = self.name.signature();
        for k in self.params.keys() {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                return Err(bad(format!("{}: unknown parameter `{k}`", self.name)));
            }
        }
        for k in required {
            if !self.params.contains_key(*k) {
                return Err(bad(format!("{}: missing parameter `{k}`", self.name)));
            }
        }
        Ok(())
    }

    pub fn apply(&self, a: &Architecture) -> Result<Evolution, EvolutionError> {
        self.check()?;
        match self.name {
            OperationName::Create => {
                let parent = if self.context.is_empty() {
                    None
                } else {
                    Some(self.path(&self.context)?)
                };
                let kind = match self.text("kind")? {
                    None | Some("plain") => ComponentKind::Plain,
                    Some("client") => ComponentKind::Client,
                    Some("server") => ComponentKind::Server,
                    Some(k) => return Err(bad(format!("create: unknown kind `{k}`"))),
                };
                create(a, parent.as_ref(), self.required_text("name")?, kind)
            }
            OperationName::Delete => delete(a, &self.path(&self.context)?),
            OperationName::MovePort => move_port(a, &self.port()?, &self.path(self.required_text("target")?)?),
            OperationName::SplitComponent => split_component(
                a,
                &self.path(&self.context)?,
                &self.list("ports")?,
                self.text("newName")?,
            ),
            OperationName::MergeComponents => {
                let mut comps = vec![self.path(&self.context)?];
                for w in self.list("with")? {
                    comps.push(self.path(&w)?);
                }
                merge_components(a, &comps, self.required_text("newName")?)
            }
            OperationName::MoveIn => move_in(a, &self.path(&self.context)?, &self.path(self.required_text("parent")?)?),
            OperationName::MoveOut => move_out(a, &self.path(&self.context)?),
            OperationName::DelegatePort => delegate_port(a, &self.port()?),
        }
    }
}

impl fmt::Display for OperationDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, self.context)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}
