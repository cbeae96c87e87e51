//! Dependency-preserving evolution operations on architectures.
//!
//! Every operation is a pure function returning the evolved architecture and
//! the renaming of ports that survived, and validates its result.

mod descriptor;

use std::collections::{BTreeMap, BTreeSet};

pub use descriptor::{OperationDescriptor, OperationName};

use crate::cosa::{
    self, ArchError, Architecture, Attachment, Binding, Component, ComponentKind, ComponentPath, Connector, Port,
    PortDirection, PortRef, RoleRef, Uses,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvolutionError {
    #[error("unknown {kind} `{name}`")]
    NotFound { kind: &'static str, name: String },
    #[error("{0}")]
    Precondition(String),
    #[error("name collision: {}", .0.join(", "))]
    Collision(Vec<String>),
    #[error("operation produced an invalid architecture: {0}")]
    Invalid(ArchError),
    #[error("bad operation descriptor: {0}")]
    Descriptor(String),
}

/// Result of an operation: the new architecture, and where each surviving
/// port of the input now lives (ports absent from the map kept their
/// reference or were removed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evolution {
    pub architecture: Architecture,
    pub relocated: BTreeMap<PortRef, PortRef>,
}

impl Evolution {
    /// Reference of an input port in the output.
    pub fn locate(&self, p: &PortRef) -> PortRef {
        self.relocated.get(p).cloned().unwrap_or_else(|| p.clone())
    }
}

fn not_found(kind: &'static str, name: impl ToString) -> EvolutionError {
    EvolutionError::NotFound {
        kind,
        name: name.to_string(),
    }
}

fn component<'a>(a: &'a Architecture, p: &ComponentPath) -> Result<&'a Component, EvolutionError> {
    a.component(p).ok_or_else(|| not_found("component", p))
}

fn component_mut<'a>(a: &'a mut Architecture, p: &ComponentPath) -> Result<&'a mut Component, EvolutionError> {
    a.component_mut(p).ok_or_else(|| not_found("component", p))
}

fn port_of(a: &Architecture, r: &PortRef) -> Result<Port, EvolutionError> {
    a.port(r).cloned().ok_or_else(|| not_found("port", r))
}

/// `base`, or `base_2`, `base_3`, ... avoiding `taken`.
fn fresh(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_owned();
    }
    (2..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !taken(n))
        .expect("unbounded")
}

fn fresh_port(c: &Component, base: &str) -> String {
    fresh(base, |n| c.port(n).is_some())
}

/// Smallest k such that `Pro<k>`, `Req<k>` and `Bridge<k>` are all free.
fn fresh_bridge(a: &Architecture, owners: &[&ComponentPath]) -> usize {
    (1..)
        .find(|k| {
            let free_port = |n: String| {
                owners
                    .iter()
                    .all(|o| a.component(o).is_none_or(|c| c.port(&n).is_none()))
            };
            free_port(format!("Pro{k}")) && free_port(format!("Req{k}")) && a.connector(&format!("Bridge{k}")).is_none()
        })
        .expect("unbounded")
}

fn add_port(a: &mut Architecture, owner: &ComponentPath, name: &str, direction: PortDirection) -> PortRef {
    let c = a.component_mut(owner).expect("owner exists");
    c.ports.push(Port {
        name: name.to_owned(),
        direction,
    });
    owner.port(name)
}

fn remove_port(a: &mut Architecture, r: &PortRef) {
    let c = a.component_mut(&r.component).expect("owner exists");
    c.ports.retain(|p| p.name != r.port);
}

/// Adds a binary bridge connector from `req` to `prov`.
fn add_bridge(a: &mut Architecture, k: usize, prov: &PortRef, req: &PortRef) {
    let name = format!("Bridge{k}");
    a.connectors.push(Connector::binary(&name));
    a.attachments.push(Attachment {
        port: prov.clone(),
        role: RoleRef::new(&name, "prov"),
    });
    a.attachments.push(Attachment {
        port: req.clone(),
        role: RoleRef::new(&name, "req"),
    });
}

/// Ports attached to the other roles of the connector of attachment `i`.
fn other_ends(a: &Architecture, i: usize) -> Vec<PortRef> {
    let att = &a.attachments[i];
    a.attachments
        .iter()
        .enumerate()
        .filter(|(j, b)| *j != i && b.role.connector == att.role.connector)
        .map(|(_, b)| b.port.clone())
        .collect()
}

fn attachment_indices(a: &Architecture, p: &PortRef) -> Vec<usize> {
    a.attachments
        .iter()
        .enumerate()
        .filter(|(_, x)| &x.port == p)
        .map(|(i, _)| i)
        .collect()
}

fn has_uses(a: &Architecture, p: &PortRef) -> bool {
    a.uses.iter().any(|u| &u.from == p || &u.to == p)
}

/// Rewrites every reference under `from` to live under `to`, recording the
/// port relocations.
fn rebase(a: &mut Architecture, from: &ComponentPath, to: &ComponentPath, relocated: &mut BTreeMap<PortRef, PortRef>) {
    let map = |r: &mut PortRef| {
        if let Some(c) = r.component.rebase(from, to) {
            r.component = c;
        }
    };
    for x in &mut a.attachments {
        map(&mut x.port);
    }
    for b in &mut a.bindings {
        map(&mut b.outer);
        map(&mut b.inner);
    }
    for u in &mut a.uses {
        map(&mut u.from);
        map(&mut u.to);
    }
    for old in relocated.values_mut() {
        map(old);
    }
    let moved: Vec<PortRef> = a
        .port_refs()
        .into_iter()
        .filter(|p| to.is_prefix_of(&p.component))
        .collect();
    for new in moved {
        let mut old = new.clone();
        old.component = new.component.rebase(to, from).expect("under `to`");
        relocated.entry(old).or_insert(new);
    }
}

/// Detaches the component at `p` from its list.
fn take(a: &mut Architecture, p: &ComponentPath) -> Component {
    let list = a.siblings_mut(p).expect("component exists");
    let i = list.iter().position(|c| c.name == p.name()).expect("component exists");
    list.remove(i)
}

fn ensure_free_sibling(a: &Architecture, parent: Option<&ComponentPath>, name: &str) -> Result<(), EvolutionError> {
    let list = match parent {
        None => &a.components[..],
        Some(p) => component(a, p)?.children(),
    };
    if list.iter().any(|c| c.name == name) {
        let at = parent.map_or_else(|| "the top level".to_owned(), |p| p.to_string());
        return Err(EvolutionError::Collision(vec![format!("component `{name}` already exists in {at}")]));
    }
    Ok(())
}

fn finish(a: Architecture, relocated: BTreeMap<PortRef, PortRef>) -> Result<Evolution, EvolutionError> {
    a.validate().map_err(EvolutionError::Invalid)?;
    let report = cosa::validate(&a).map_err(EvolutionError::Invalid)?;
    if !report.ok {
        return Err(EvolutionError::Invalid(ArchError(
            report.violations.into_iter().map(|v| v.message).collect(),
        )));
    }
    let relocated = relocated.into_iter().filter(|(k, v)| k != v).collect();
    Ok(Evolution {
        architecture: a,
        relocated,
    })
}

/// A port on `parent` bound to exactly one child port, with no other role:
/// such a port only relays one link and can be dissolved.
fn is_relay(a: &Architecture, q: &PortRef) -> bool {
    a.bindings.iter().filter(|b| &b.outer == q).count() == 1
        && !a.bindings.iter().any(|b| &b.inner == q)
        && !has_uses(a, q)
}

/// Creates a port on the parent of `inner`'s owner relaying `inner`: the
/// given attachments and upward bindings move to it.
fn delegate_to_parent(
    a: &mut Architecture,
    inner: &PortRef,
    dir: PortDirection,
    parent: &ComponentPath,
    attachments: &[usize],
    upward: &[usize],
) -> PortRef {
    let name = fresh_port(a.component(parent).expect("parent exists"), &inner.port);
    let outer = add_port(a, parent, &name, dir);
    for &i in attachments {
        a.attachments[i].port = outer.clone();
    }
    for &j in upward {
        a.bindings[j].inner = outer.clone();
    }
    a.bindings.push(Binding {
        outer: outer.clone(),
        inner: inner.clone(),
    });
    outer
}

/// Moves `comp` into the configuration of its sibling `parent`.
///
/// Links of `comp` leaving `parent` are delegated through new ports of
/// `parent`. A link reaching a relay port of `parent` is dissolved instead:
/// the relayed child port is attached directly and the relay removed.
pub fn move_in(a: &Architecture, comp: &ComponentPath, parent: &ComponentPath) -> Result<Evolution, EvolutionError> {
    component(a, comp)?;
    component(a, parent)?;
    if comp == parent || comp.is_prefix_of(parent) {
        return Err(EvolutionError::Precondition(format!("cannot move {comp} into itself or its own descendant {parent}")));
    }
    if comp.parent() != parent.parent() {
        return Err(EvolutionError::Precondition(format!(
            "{comp} and {parent} must be siblings; move {comp} out first"
        )));
    }
    ensure_free_sibling(a, Some(parent), comp.name())?;
    let mut a = a.clone();
    let mut relocated = BTreeMap::new();
    let inside = |r: &PortRef| parent.is_prefix_of(&r.component) && &r.component != parent;
    let new_path = parent.child(comp.name());
    let ports = component(&a, comp)?.ports.clone();
    for port in &ports {
        let pref = comp.port(&port.name);
        let mut crossing = Vec::new();
        for i in attachment_indices(&a, &pref) {
            let others = other_ends(&a, i);
            if others.iter().all(inside) {
                continue;
            }
            if let [o] = others.as_slice() {
                if &o.component == parent && is_relay(&a, o) && attachment_indices(&a, o).len() == 1 {
                    let o = o.clone();
                    let b = a.bindings.iter().position(|b| b.outer == o).expect("relay binding");
                    let relayed = a.bindings.remove(b).inner;
                    for j in attachment_indices(&a, &o) {
                        a.attachments[j].port = relayed.clone();
                    }
                    remove_port(&mut a, &o);
                    continue;
                }
            }
            if others.iter().any(|o| &o.component == parent) {
                return Err(EvolutionError::Precondition(format!(
                    "{pref} is connected to its new parent {parent}"
                )));
            }
            crossing.push(i);
        }
        let upward: Vec<usize> = a
            .bindings
            .iter()
            .enumerate()
            .filter(|(_, b)| b.inner == pref)
            .map(|(j, _)| j)
            .collect();
        if !crossing.is_empty() || !upward.is_empty() {
            delegate_to_parent(&mut a, &new_path.port(&port.name), port.direction, parent, &crossing, &upward);
        }
    }
    let c = take(&mut a, comp);
    component_mut(&mut a, parent)?.configuration.get_or_insert_with(Vec::new).push(c);
    rebase(&mut a, comp, &new_path, &mut relocated);
    finish(a, relocated)
}

/// Moves a contained component next to its parent.
///
/// Relay ports of the parent serving only `comp` are dissolved; other
/// bindings to `comp` become bridge connectors, and links to former
/// siblings are delegated through the parent.
pub fn move_out(a: &Architecture, comp: &ComponentPath) -> Result<Evolution, EvolutionError> {
    component(a, comp)?;
    let parent = comp
        .parent()
        .ok_or_else(|| EvolutionError::Precondition(format!("{comp} is already a top-level component")))?;
    let grand = parent.parent();
    ensure_free_sibling(a, grand.as_ref(), comp.name())?;
    let new_path = grand.as_ref().map_or_else(|| ComponentPath::top(comp.name()), |g| g.child(comp.name()));
    let mut a = a.clone();
    let mut relocated = BTreeMap::new();
    let ports = component(&a, comp)?.ports.clone();
    for port in &ports {
        let pref = comp.port(&port.name);
        let outers: Vec<PortRef> = a
            .bindings
            .iter()
            .filter(|b| b.inner == pref)
            .map(|b| b.outer.clone())
            .collect();
        for q in outers {
            a.bindings.retain(|b| !(b.outer == q && b.inner == pref));
            let relay = !a.bindings.iter().any(|b| b.outer == q) && !has_uses(&a, &q);
            if relay {
                for x in &mut a.attachments {
                    if x.port == q {
                        x.port = new_path.port(&port.name);
                    }
                }
                for b in &mut a.bindings {
                    if b.inner == q {
                        b.inner = new_path.port(&port.name);
                    }
                }
                remove_port(&mut a, &q);
                continue;
            }
            let k = fresh_bridge(&a, &[&parent]);
            match port.direction {
                PortDirection::Provided => {
                    let req = add_port(&mut a, &parent, &format!("Req{k}"), PortDirection::Required);
                    a.uses.push(Uses { from: q, to: req.clone() });
                    add_bridge(&mut a, k, &pref, &req);
                }
                PortDirection::Required => {
                    let pro = add_port(&mut a, &parent, &format!("Pro{k}"), PortDirection::Provided);
                    a.uses.push(Uses { from: pro.clone(), to: q });
                    add_bridge(&mut a, k, &pro, &pref);
                }
            }
        }
        for i in attachment_indices(&a, &pref) {
            for o in other_ends(&a, i) {
                let sibling_side =
                    parent.is_prefix_of(&o.component) && o.component != parent && !comp.is_prefix_of(&o.component);
                if !sibling_side {
                    continue;
                }
                let j = a
                    .attachments
                    .iter()
                    .position(|x| x.port == o && x.role.connector == a.attachments[i].role.connector)
                    .expect("attached");
                let mut cur = o;
                while cur.component != parent {
                    let up = cur.component.parent().expect("inside parent");
                    let dir = port_of(&a, &cur)?.direction;
                    cur = delegate_to_parent(&mut a, &cur, dir, &up, &[j], &[]);
                }
            }
        }
    }
    let c = take(&mut a, comp);
    let emptied = component_mut(&mut a, &parent)?;
    if emptied.kind == ComponentKind::Plain && emptied.children().is_empty() {
        emptied.configuration = None;
    }
    match &grand {
        None => a.components.push(c),
        Some(g) => component_mut(&mut a, g)?.configuration.get_or_insert_with(Vec::new).push(c),
    }
    rebase(&mut a, comp, &new_path, &mut relocated);
    finish(a, relocated)
}

/// Adds a same-direction port to the parent of `port`'s owner, bound to
/// `port`, and moves the attachments of `port` that leave the parent onto
/// it. No-op when `port` is already bound from outside.
pub fn delegate_port(a: &Architecture, port: &PortRef) -> Result<Evolution, EvolutionError> {
    let dir = port_of(a, port)?.direction;
    let parent = port
        .component
        .parent()
        .ok_or_else(|| EvolutionError::Precondition(format!("{} is a top-level component", port.component)))?;
    if a.bindings.iter().any(|b| &b.inner == port) {
        return finish(a.clone(), BTreeMap::new());
    }
    let mut a = a.clone();
    let leaving: Vec<usize> = attachment_indices(&a, port)
        .into_iter()
        .filter(|&i| {
            other_ends(&a, i)
                .iter()
                .any(|o| !parent.is_prefix_of(&o.component) || o.component == parent)
        })
        .collect();
    delegate_to_parent(&mut a, port, dir, &parent, &leaving, &[]);
    finish(a, BTreeMap::new())
}

/// Moves the named ports of `owner` to `target`, bridging every uses edge
/// that the move cuts with a `Pro<k>`/`Req<k>` port pair and a connector.
fn relocate_ports(
    a: &mut Architecture,
    owner: &ComponentPath,
    names: &BTreeSet<String>,
    target: &ComponentPath,
    relocated: &mut BTreeMap<PortRef, PortRef>,
) -> Result<(), EvolutionError> {
    let src = component(a, owner)?.clone();
    let dst = component(a, target)?;
    if owner == target {
        return Err(EvolutionError::Precondition(format!("{owner} already owns the ports")));
    }
    for n in names {
        if src.port(n).is_none() {
            return Err(not_found("port", owner.port(n)));
        }
    }
    let clashes: Vec<String> = names
        .iter()
        .filter(|n| dst.port(n).is_some())
        .map(|n| format!("port {} already exists", target.port(n)))
        .collect();
    if !clashes.is_empty() {
        return Err(EvolutionError::Collision(clashes));
    }
    let moved = |r: &PortRef| &r.component == owner && names.contains(&r.port);
    if let Some(b) = a.bindings.iter().find(|b| moved(&b.outer)) {
        return Err(EvolutionError::Precondition(format!(
            "{} delegates to {} and cannot leave {owner}",
            b.outer, b.inner
        )));
    }
    for (i, x) in a.attachments.iter().enumerate() {
        if !moved(&x.port) {
            continue;
        }
        if let Some(o) = other_ends(a, i).into_iter().find(|o| target.is_prefix_of(&o.component)) {
            return Err(EvolutionError::Precondition(format!(
                "{} is connected to {o} and cannot move onto {target}",
                x.port
            )));
        }
    }
    let map = |r: &PortRef| if moved(r) { target.port(&r.port) } else { r.clone() };

    let moving: Vec<Port> = src.ports.iter().filter(|p| names.contains(&p.name)).cloned().collect();
    component_mut(a, owner)?.ports.retain(|p| !names.contains(&p.name));
    component_mut(a, target)?.ports.extend(moving.iter().cloned());
    for p in &moving {
        relocated.insert(owner.port(&p.name), target.port(&p.name));
    }
    for x in &mut a.attachments {
        x.port = map(&x.port);
    }
    for b in &mut a.bindings {
        b.outer = map(&b.outer);
        b.inner = map(&b.inner);
    }
    for i in 0..a.uses.len() {
        let u = a.uses[i].clone();
        let (fm, tm) = (moved(&u.from), moved(&u.to));
        if fm == tm {
            a.uses[i] = Uses {
                from: map(&u.from),
                to: map(&u.to),
            };
            continue;
        }
        let (from_side, to_side) = if fm { (target, owner) } else { (owner, target) };
        let k = fresh_bridge(a, &[owner, target]);
        let req = add_port(a, from_side, &format!("Req{k}"), PortDirection::Required);
        let pro = add_port(a, to_side, &format!("Pro{k}"), PortDirection::Provided);
        a.uses[i] = Uses {
            from: map(&u.from),
            to: req.clone(),
        };
        a.uses.push(Uses {
            from: pro.clone(),
            to: map(&u.to),
        });
        add_bridge(a, k, &pro, &req);
    }
    Ok(())
}

/// Moves one port to another component, bridging cut uses edges.
pub fn move_port(a: &Architecture, port: &PortRef, target: &ComponentPath) -> Result<Evolution, EvolutionError> {
    port_of(a, port)?;
    let mut a = a.clone();
    let mut relocated = BTreeMap::new();
    relocate_ports(
        &mut a,
        &port.component,
        &BTreeSet::from([port.port.clone()]),
        target,
        &mut relocated,
    )?;
    finish(a, relocated)
}

/// Splits `comp` by moving `ports` to a new sibling placed right after it,
/// named `new_name` or `<name>_2`.
pub fn split_component(
    a: &Architecture,
    comp: &ComponentPath,
    ports: &[String],
    new_name: Option<&str>,
) -> Result<Evolution, EvolutionError> {
    let c = component(a, comp)?;
    let names: BTreeSet<String> = ports.iter().cloned().collect();
    if names.is_empty() {
        return Err(EvolutionError::Precondition("split needs at least one port to move".into()));
    }
    if c.ports.iter().all(|p| names.contains(&p.name)) {
        return Err(EvolutionError::Precondition(format!("split would move every port of {comp}")));
    }
    let parent = comp.parent();
    let siblings = a.siblings(comp).expect("component exists");
    let name = match new_name {
        Some(n) => {
            ensure_free_sibling(a, parent.as_ref(), n)?;
            n.to_owned()
        }
        None => fresh(&format!("{}_2", comp.name()), |n| siblings.iter().any(|s| s.name == n)),
    };
    let mut a = a.clone();
    let list = a.siblings_mut(comp).expect("component exists");
    let i = list.iter().position(|s| s.name == comp.name()).expect("component exists");
    list.insert(i + 1, Component::new(&name));
    let mut relocated = BTreeMap::new();
    relocate_ports(&mut a, comp, &names, &comp.sibling(&name), &mut relocated)?;
    finish(a, relocated)
}

/// Merges sibling components into one placed where the first was. Connectors
/// joining only the merged component collapse into uses edges.
pub fn merge_components(
    a: &Architecture,
    comps: &[ComponentPath],
    new_name: &str,
) -> Result<Evolution, EvolutionError> {
    if comps.len() < 2 {
        return Err(EvolutionError::Precondition("merge needs at least two components".into()));
    }
    let parent = comps[0].parent();
    let mut seen = BTreeSet::new();
    for c in comps {
        component(a, c)?;
        if c.parent() != parent {
            return Err(EvolutionError::Precondition("merged components must be siblings".into()));
        }
        if !seen.insert(c) {
            return Err(EvolutionError::Precondition(format!("{c} listed twice")));
        }
    }
    let siblings = a.siblings(&comps[0]).expect("component exists");
    if siblings.iter().any(|s| s.name == new_name && !comps.iter().any(|c| c.name() == new_name)) {
        return Err(EvolutionError::Collision(vec![format!("component `{new_name}` already exists")]));
    }
    let parts: Vec<Component> = comps.iter().map(|c| a.component(c).expect("checked").clone()).collect();
    let mut clashes = Vec::new();
    let mut port_names = BTreeSet::new();
    let mut child_names = BTreeSet::new();
    for (c, part) in comps.iter().zip(&parts) {
        for p in &part.ports {
            if !port_names.insert(p.name.clone()) {
                clashes.push(format!("port `{}` (again on {c})", p.name));
            }
        }
        for k in part.children() {
            if !child_names.insert(k.name.clone()) {
                clashes.push(format!("child `{}` (again in {c})", k.name));
            }
        }
    }
    if !clashes.is_empty() {
        return Err(EvolutionError::Collision(clashes));
    }
    let kind = if parts.iter().all(|p| p.kind == parts[0].kind) {
        parts[0].kind
    } else {
        ComponentKind::Plain
    };
    let mut merged = Component::new(new_name).with_kind(kind);
    for part in &parts {
        merged.ports.extend(part.ports.iter().cloned());
        if let Some(cfg) = &part.configuration {
            merged.configuration.get_or_insert_with(Vec::new).extend(cfg.iter().cloned());
        }
    }

    let mut a = a.clone();
    let new_path = comps[0].sibling(new_name);
    let list = a.siblings_mut(&comps[0]).expect("component exists");
    let at = list.iter().position(|s| s.name == comps[0].name()).expect("exists");
    list[at] = merged;
    list.retain(|s| s.name == new_name || !comps[1..].iter().any(|c| c.name() == s.name));
    let mut relocated = BTreeMap::new();
    for c in comps {
        rebase_refs_only(&mut a, c, &new_path, &mut relocated);
    }

    let internal: Vec<String> = a
        .connectors
        .iter()
        .filter(|k| {
            let ends: Vec<&Attachment> = a.attachments.iter().filter(|x| x.role.connector == k.name).collect();
            ends.len() >= 2 && ends.iter().all(|x| x.port.component == new_path)
        })
        .map(|k| k.name.clone())
        .collect();
    for k in &internal {
        let ends: Vec<PortRef> = a
            .attachments
            .iter()
            .filter(|x| &x.role.connector == k)
            .map(|x| x.port.clone())
            .collect();
        let dir = |p: &PortRef| a.port(p).expect("exists").direction;
        let mut new_uses = Vec::new();
        for r in ends.iter().filter(|p| dir(p) == PortDirection::Required) {
            for p in ends.iter().filter(|p| dir(p) == PortDirection::Provided) {
                new_uses.push(Uses {
                    from: r.clone(),
                    to: p.clone(),
                });
            }
        }
        for u in new_uses {
            if !a.uses.contains(&u) {
                a.uses.push(u);
            }
        }
        a.attachments.retain(|x| &x.role.connector != k);
        a.connectors.retain(|c| &c.name != k);
    }
    finish(a, relocated)
}

/// Like [`rebase`] but the subtree has already been moved, so port
/// relocations are computed from the references themselves.
fn rebase_refs_only(
    a: &mut Architecture,
    from: &ComponentPath,
    to: &ComponentPath,
    relocated: &mut BTreeMap<PortRef, PortRef>,
) {
    let mut map = |r: &mut PortRef| {
        if let Some(c) = r.component.rebase(from, to) {
            let new = c.port(&r.port);
            relocated.insert(r.clone(), new.clone());
            *r = new;
        }
    };
    for x in &mut a.attachments {
        map(&mut x.port);
    }
    for b in &mut a.bindings {
        map(&mut b.outer);
        map(&mut b.inner);
    }
    for u in &mut a.uses {
        map(&mut u.from);
        map(&mut u.to);
    }
}

/// Adds a component at the top level or inside `parent`. Clients and
/// servers start with an empty configuration.
pub fn create(
    a: &Architecture,
    parent: Option<&ComponentPath>,
    name: &str,
    kind: ComponentKind,
) -> Result<Evolution, EvolutionError> {
    if let Some(p) = parent {
        component(a, p)?;
    }
    ensure_free_sibling(a, parent, name)?;
    let mut c = Component::new(name).with_kind(kind);
    if kind != ComponentKind::Plain {
        c.configuration = Some(Vec::new());
    }
    let mut a = a.clone();
    match parent {
        None => a.components.push(c),
        Some(p) => component_mut(&mut a, p)?.configuration.get_or_insert_with(Vec::new).push(c),
    }
    finish(a, BTreeMap::new())
}

/// Removes a component with its subtree and every attachment, binding and
/// uses edge touching its ports.
pub fn delete(a: &Architecture, comp: &ComponentPath) -> Result<Evolution, EvolutionError> {
    component(a, comp)?;
    let mut a = a.clone();
    take(&mut a, comp);
    let gone = |r: &PortRef| comp.is_prefix_of(&r.component);
    a.attachments.retain(|x| !gone(&x.port));
    a.bindings.retain(|b| !gone(&b.outer) && !gone(&b.inner));
    a.uses.retain(|u| !gone(&u.from) && !gone(&u.to));
    finish(a, BTreeMap::new())
}
