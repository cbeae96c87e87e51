use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortDirection {
    Provided,
    Required,
}

impl PortDirection {
    pub fn flip(self) -> Self {
        match self {
            PortDirection::Provided => PortDirection::Required,
            PortDirection::Required => PortDirection::Provided,
        }
    }
}

impl fmt::Display for PortDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortDirection::Provided => "provided",
            PortDirection::Required => "required",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    #[default]
    Plain,
    Client,
    Server,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub direction: PortDirection,
}

impl Port {
    pub fn provided(name: &str) -> Port {
        Port {
            name: name.to_owned(),
            direction: PortDirection::Provided,
        }
    }

    pub fn required(name: &str) -> Port {
        Port {
            name: name.to_owned(),
            direction: PortDirection::Required,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    #[serde(default)]
    pub kind: ComponentKind,
    #[serde(default)]
    pub ports: Vec<Port>,
    /// `Some` for composite components, even when the configuration is empty.
    #[serde(rename = "children", default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Vec<Component>>,
}

impl Component {
    pub fn new(name: &str) -> Component {
        Component {
            name: name.to_owned(),
            kind: ComponentKind::Plain,
            ports: Vec::new(),
            configuration: None,
        }
    }

    pub fn with_kind(mut self, kind: ComponentKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_ports(mut self, ports: impl IntoIterator<Item = Port>) -> Self {
        self.ports.extend(ports);
        self
    }

    pub fn with_children(mut self, children: impl IntoIterator<Item = Component>) -> Self {
        self.configuration.get_or_insert_with(Vec::new).extend(children);
        self
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn children(&self) -> &[Component] {
        self.configuration.as_deref().unwrap_or(&[])
    }

    pub fn child(&self, name: &str) -> Option<&Component> {
        self.children().iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Role {
    pub name: String,
    pub direction: PortDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connector {
    pub name: String,
    #[serde(default)]
    pub roles: Vec<Role>,
}

impl Connector {
    /// A connector with one provided role `prov` and one required role `req`.
    pub fn binary(name: &str) -> Connector {
        Connector {
            name: name.to_owned(),
            roles: vec![
                Role {
                    name: "prov".into(),
                    direction: PortDirection::Provided,
                },
                Role {
                    name: "req".into(),
                    direction: PortDirection::Required,
                },
            ],
        }
    }

    pub fn role(&self, name: &str) -> Option<&Role> {
        self.roles.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefError {
    #[error("empty reference")]
    Empty,
    #[error("malformed reference `{0}`")]
    Malformed(String),
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(['/', '#']) && s.trim() == s
}

/// Path of a component from the top level, written `A/B/C`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentPath(Vec<String>);

impl ComponentPath {
    pub fn new(segments: Vec<String>) -> Result<Self, RefError> {
        if segments.is_empty() {
            return Err(RefError::Empty);
        }
        if let Some(bad) = segments.iter().find(|s| !valid_name(s)) {
            return Err(RefError::Malformed(bad.clone()));
        }
        Ok(ComponentPath(segments))
    }

    pub fn top(name: &str) -> Self {
        ComponentPath(vec![name.to_owned()])
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self) -> &str {
        self.0.last().expect("nonempty")
    }

    pub fn parent(&self) -> Option<ComponentPath> {
        (self.0.len() > 1).then(|| ComponentPath(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn child(&self, name: &str) -> ComponentPath {
        let mut v = self.0.clone();
        v.push(name.to_owned());
        ComponentPath(v)
    }

    /// Same parent, different last segment.
    pub fn sibling(&self, name: &str) -> ComponentPath {
        let mut v = self.0.clone();
        *v.last_mut().expect("nonempty") = name.to_owned();
        ComponentPath(v)
    }

    /// Whether `self` is `other` or one of its ancestors.
    pub fn is_prefix_of(&self, other: &ComponentPath) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Rewrites the prefix `from` into `to` (used when a subtree moves).
    pub fn rebase(&self, from: &ComponentPath, to: &ComponentPath) -> Option<ComponentPath> {
        self.0.strip_prefix(from.0.as_slice()).map(|rest| {
            let mut v = to.0.clone();
            v.extend(rest.iter().cloned());
            ComponentPath(v)
        })
    }

    pub fn port(&self, name: &str) -> PortRef {
        PortRef {
            component: self.clone(),
            port: name.to_owned(),
        }
    }
}

impl fmt::Display for ComponentPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("/"))
    }
}

impl FromStr for ComponentPath {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, RefError> {
        if s.is_empty() {
            return Err(RefError::Empty);
        }
        ComponentPath::new(s.split('/').map(str::to_owned).collect()).map_err(|_| RefError::Malformed(s.to_owned()))
    }
}

/// `Component/Child#port`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub component: ComponentPath,
    pub port: String,
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.component, self.port)
    }
}

impl FromStr for PortRef {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, RefError> {
        let (c, p) = s.split_once('#').ok_or_else(|| RefError::Malformed(s.to_owned()))?;
        if !valid_name(p) {
            return Err(RefError::Malformed(s.to_owned()));
        }
        Ok(PortRef {
            component: c.parse()?,
            port: p.to_owned(),
        })
    }
}

/// `Connector#role`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleRef {
    pub connector: String,
    pub role: String,
}

impl RoleRef {
    pub fn new(connector: &str, role: &str) -> Self {
        RoleRef {
            connector: connector.to_owned(),
            role: role.to_owned(),
        }
    }
}

impl fmt::Display for RoleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.connector, self.role)
    }
}

impl FromStr for RoleRef {
    type Err = RefError;

    fn from_str(s: &str) -> Result<Self, RefError> {
        match s.split_once('#') {
            Some((c, r)) if valid_name(c) && valid_name(r) => Ok(RoleRef::new(c, r)),
            _ => Err(RefError::Malformed(s.to_owned())),
        }
    }
}

macro_rules! string_serde {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}

string_serde!(ComponentPath, PortRef, RoleRef);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Attachment {
    pub port: PortRef,
    pub role: RoleRef,
}

/// Outer port (on the composite) to inner port (on a direct child).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding {
    pub outer: PortRef,
    pub inner: PortRef,
}

/// Internal dependency: `from` uses `to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Uses {
    pub from: PortRef,
    pub to: PortRef,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub name: String,
    #[serde(default)]
    pub components: Vec<Component>,
    #[serde(default)]
    pub connectors: Vec<Connector>,
    #[serde(default)]
    pub attachments: Vec<Attachment>,
    #[serde(default)]
    pub bindings: Vec<Binding>,
    #[serde(default)]
    pub uses: Vec<Uses>,
}

/// Problems found by [`Architecture::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid architecture: {}", .0.join("; "))]
pub struct ArchError(pub Vec<String>);

impl ArchError {
    pub fn one(msg: impl Into<String>) -> Self {
        ArchError(vec![msg.into()])
    }
}

impl Architecture {
    pub fn new(name: &str) -> Self {
        Architecture {
            name: name.to_owned(),
            ..Default::default()
        }
    }

    pub fn component(&self, path: &ComponentPath) -> Option<&Component> {
        let (first, rest) = path.segments().split_first()?;
        let mut c = self.components.iter().find(|c| &c.name == first)?;
        for seg in rest {
            c = c.child(seg)?;
        }
        Some(c)
    }

    pub fn component_mut(&mut self, path: &ComponentPath) -> Option<&mut Component> {
        let (first, rest) = path.segments().split_first()?;
        let mut c = self.components.iter_mut().find(|c| &c.name == first)?;
        for seg in rest {
            c = c.configuration.as_mut()?.iter_mut().find(|k| &k.name == seg)?;
        }
        Some(c)
    }

    /// The list a component at `path` lives in (top level or a configuration).
    pub(crate) fn siblings_mut(&mut self, path: &ComponentPath) -> Option<&mut Vec<Component>> {
        match path.parent() {
            None => Some(&mut self.components),
            Some(p) => self.component_mut(&p)?.configuration.as_mut(),
        }
    }

    pub(crate) fn siblings(&self, path: &ComponentPath) -> Option<&[Component]> {
        match path.parent() {
            None => Some(&self.components),
            Some(p) => self.component(&p)?.configuration.as_deref(),
        }
    }

    pub fn port(&self, r: &PortRef) -> Option<&Port> {
        self.component(&r.component)?.port(&r.port)
    }

    pub fn connector(&self, name: &str) -> Option<&Connector> {
        self.connectors.iter().find(|c| c.name == name)
    }

    pub fn role(&self, r: &RoleRef) -> Option<&Role> {
        self.connector(&r.connector)?.role(&r.role)
    }

    /// Every component path, depth first in declaration order.
    pub fn component_paths(&self) -> Vec<ComponentPath> {
        fn go(prefix: Option<&ComponentPath>, cs: &[Component], out: &mut Vec<ComponentPath>) {
            for c in cs {
                let p = match prefix {
                    Some(pre) => pre.child(&c.name),
                    None => ComponentPath::top(&c.name),
                };
                out.push(p.clone());
                go(Some(&p), c.children(), out);
            }
        }
        let mut out = Vec::new();
        go(None, &self.components, &mut out);
        out
    }

    /// Every port reference, in component order then port order.
    pub fn port_refs(&self) -> Vec<PortRef> {
        self.component_paths()
            .into_iter()
            .flat_map(|p| {
                let c = self.component(&p).expect("listed");
                c.ports.iter().map(move |port| p.port(&port.name)).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn attachments_of<'a>(&'a self, port: &'a PortRef) -> impl Iterator<Item = &'a Attachment> {
        self.attachments.iter().filter(move |a| &a.port == port)
    }

    /// Port attached to a role, if any.
    pub fn attached_port(&self, role: &RoleRef) -> Option<&PortRef> {
        self.attachments.iter().find(|a| &a.role == role).map(|a| &a.port)
    }

    /// Checks every invariant: [`Architecture::check_references`] plus the
    /// binding and uses rules that the base graph invariants also express.
    pub fn validate(&self) -> Result<(), ArchError> {
        let mut errs = match self.check_references() {
            Ok(()) => Vec::new(),
            Err(e) => e.0,
        };
        for b in &self.bindings {
            let (Some(o), Some(i)) = (self.port(&b.outer), self.port(&b.inner)) else { continue };
            if b.inner.component.parent().as_ref() != Some(&b.outer.component) {
                errs.push(format!(
                    "binding {} -> {} does not cross exactly one containment level",
                    b.outer, b.inner
                ));
            }
            if o.direction != i.direction {
                errs.push(format!(
                    "binding {} -> {} joins a {} and a {} port",
                    b.outer, b.inner, o.direction, i.direction
                ));
            }
        }
        for u in &self.uses {
            if u.from.component != u.to.component {
                errs.push(format!("uses {} -> {} spans two components", u.from, u.to));
            } else if u.from == u.to {
                errs.push(format!("uses {} -> {} is a self-dependency", u.from, u.to));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ArchError(errs))
        }
    }

    /// Load-time checks: names, uniqueness, resolvable references,
    /// attachment directions and acyclic uses. Architectures passing these
    /// can be encoded; the remaining invariants are checked on the graph.
    pub fn check_references(&self) -> Result<(), ArchError> {
        let mut errs = Vec::new();
        if self.name.is_empty() {
            errs.push("architecture name is empty".to_owned());
        }
        fn walk(prefix: Option<&ComponentPath>, cs: &[Component], errs: &mut Vec<String>) {
            let mut seen = BTreeSet::new();
            for c in cs {
                let where_ = prefix.map_or_else(|| "top level".to_owned(), |p| format!("configuration of {p}"));
                if !valid_name(&c.name) {
                    errs.push(format!("invalid component name `{}` in {where_}", c.name));
                    continue;
                }
                if !seen.insert(c.name.as_str()) {
                    errs.push(format!("duplicate component `{}` in {where_}", c.name));
                }
                let path = prefix.map_or_else(|| ComponentPath::top(&c.name), |p| p.child(&c.name));
                let mut ports = BTreeSet::new();
                for p in &c.ports {
                    if !valid_name(&p.name) {
                        errs.push(format!("invalid port name `{}` on {path}", p.name));
                    } else if !ports.insert(p.name.as_str()) {
                        errs.push(format!("duplicate port {}", path.port(&p.name)));
                    }
                }
                walk(Some(&path), c.children(), errs);
            }
        }
        walk(None, &self.components, &mut errs);

        let mut conns = BTreeSet::new();
        for k in &self.connectors {
            if !valid_name(&k.name) {
                errs.push(format!("invalid connector name `{}`", k.name));
            } else if !conns.insert(k.name.as_str()) {
                errs.push(format!("duplicate connector `{}`", k.name));
            }
            let mut roles = BTreeSet::new();
            for r in &k.roles {
                if !valid_name(&r.name) {
                    errs.push(format!("invalid role name `{}` on connector {}", r.name, k.name));
                } else if !roles.insert(r.name.as_str()) {
                    errs.push(format!("duplicate role {}#{}", k.name, r.name));
                }
            }
        }

        let mut attached_roles = BTreeSet::new();
        for (i, a) in self.attachments.iter().enumerate() {
            let (port, role) = (self.port(&a.port), self.role(&a.role));
            if port.is_none() {
                errs.push(format!("attachment {i}: unknown port {}", a.port));
            }
            if role.is_none() {
                errs.push(format!("attachment {i}: unknown role {}", a.role));
            }
            if let (Some(p), Some(r)) = (port, role) {
                if p.direction != r.direction {
                    errs.push(format!(
                        "attachment {} -> {}: {} port on {} role",
                        a.port, a.role, p.direction, r.direction
                    ));
                }
            }
            if !attached_roles.insert(&a.role) {
                errs.push(format!("role {} has more than one attachment", a.role));
            }
        }

        let mut seen_bindings = BTreeSet::new();
        for b in &self.bindings {
            let (outer, inner) = (self.port(&b.outer), self.port(&b.inner));
            if outer.is_none() {
                errs.push(format!("binding: unknown port {}", b.outer));
            }
            if inner.is_none() {
                errs.push(format!("binding: unknown port {}", b.inner));
            }
            if !seen_bindings.insert(b) {
                errs.push(format!("duplicate binding {} -> {}", b.outer, b.inner));
            }
        }

        let mut seen_uses = BTreeSet::new();
        for u in &self.uses {
            for end in [&u.from, &u.to] {
                if self.port(end).is_none() {
                    errs.push(format!("uses: unknown port {end}"));
                }
            }
            if !seen_uses.insert(u) {
                errs.push(format!("duplicate uses {} -> {}", u.from, u.to));
            }
        }
        if let Some(cycle) = uses_cycle(&self.uses) {
            errs.push(format!("uses edges form a cycle through {cycle}"));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(ArchError(errs))
        }
    }
}

fn uses_cycle(uses: &[Uses]) -> Option<&PortRef> {
    let mut succ: BTreeMap<&PortRef, Vec<&PortRef>> = BTreeMap::new();
    for u in uses {
        succ.entry(&u.from).or_default().push(&u.to);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&PortRef, u8> = BTreeMap::new();
    fn dfs<'a>(
        n: &'a PortRef,
        succ: &BTreeMap<&'a PortRef, Vec<&'a PortRef>>,
        state: &mut BTreeMap<&'a PortRef, u8>,
    ) -> Option<&'a PortRef> {
        state.insert(n, 1);
        for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            match state.get(m).copied().unwrap_or(0) {
                1 => return Some(m),
                0 => {
                    if let Some(c) = dfs(m, succ, state) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        state.insert(n, 2);
        None
    }
    let starts: Vec<&PortRef> = succ.keys().copied().collect();
    for s in starts {
        if state.get(s).copied().unwrap_or(0) == 0 {
            if let Some(c) = dfs(s, &succ, &mut state) {
                return Some(c);
            }
        }
    }
    None
}
