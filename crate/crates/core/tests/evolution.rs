mod common;

use std::collections::BTreeSet;

use archevol_core::cosa::{
    self, dependency_reachability, rules, Architecture, ComponentKind, ComponentPath, PortRef, RoleRef,
};
use archevol_core::evolution::{
    create, delegate_port, merge_components, move_in, move_out, move_port, split_component, EvolutionError,
};
use archevol_core::fixtures;
use archevol_core::graph::matching::Bindings;
use archevol_core::graph::{NodeId, Value};
use archevol_core::rewrite::{apply, find_matches};
use common::{random_architecture, random_operation, reachability_diff, reachability_oracle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn path(s: &str) -> ComponentPath {
    s.parse().unwrap()
}

fn port(s: &str) -> PortRef {
    s.parse().unwrap()
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn assert_preserved(before: &Architecture, ev: &archevol_core::evolution::Evolution) {
    let (gained, lost) = reachability_diff(before, &ev.architecture, &ev.relocated);
    assert!(gained.is_empty() && lost.is_empty(), "gained {gained:?}, lost {lost:?}");
}

#[test]
fn split_moving_two_ports_bridges_one_edge() {
    let a = fixtures::eshop();
    let ev = split_component(&a, &path("Product"), &strings(&["SelectProduct", "OpenOrder"]), None).unwrap();
    let b = &ev.architecture;
    assert_eq!(b.connectors.len(), a.connectors.len() + 1);
    let uses: BTreeSet<(String, String)> =
        b.uses.iter().map(|u| (u.from.to_string(), u.to.to_string())).collect();
    let expected: BTreeSet<(String, String)> = [
        ("Product_2#OpenOrder", "Product_2#SelectProduct"),
        ("Product_2#SelectProduct", "Product_2#Req1"),
        ("Product#Pro1", "Product#ViewProduct"),
    ]
    .iter()
    .map(|(x, y)| (x.to_string(), y.to_string()))
    .collect();
    assert_eq!(uses, expected);
    assert_preserved(&a, &ev);
}

#[test]
fn moving_connected_ports_together_needs_no_bridge() {
    let a = fixtures::eshop();
    let ev = split_component(&a, &path("Product"), &strings(&["SelectProduct", "ViewProduct"]), None).unwrap();
    let b = &ev.architecture;
    assert_eq!(b.connectors.len(), a.connectors.len() + 1);
    assert!(b
        .uses
        .iter()
        .any(|u| u.from == port("Product_2#SelectProduct") && u.to == port("Product_2#ViewProduct")));
    assert_preserved(&a, &ev);
}

#[test]
fn dependency_free_port_moves_alone() {
    let a = fixtures::eshop();
    let a = create(&a, None, "Sink", ComponentKind::Plain).unwrap().architecture;
    let ev = move_port(&a, &port("Customer#Pwd"), &path("Sink")).unwrap();
    let b = &ev.architecture;
    assert_eq!(b.connectors, a.connectors);
    assert_eq!(b.uses, a.uses);
    assert_eq!(b.component(&path("Sink")).unwrap().ports.len(), 1);
    assert!(b.port(&port("Customer#Pwd")).is_none());
}

#[test]
fn move_port_rejects_name_clash() {
    let a = fixtures::eshop();
    let err = move_port(&a, &port("Customer#Bill"), &path("Order")).unwrap_err();
    assert!(matches!(err, EvolutionError::Collision(_)), "{err}");
}

#[test]
fn merge_of_disjoint_unconnected_components_unions_ports() {
    let a = fixtures::eshop();
    let a = create(&a, None, "X", ComponentKind::Plain).unwrap().architecture;
    let a = move_port(&a, &port("Customer#Pwd"), &path("X")).unwrap().architecture;
    let b = merge_components(&a, &[path("X"), path("Product")], "XP").unwrap().architecture;
    let names: Vec<&str> = b.component(&path("XP")).unwrap().ports.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["Pwd", "ViewProduct", "SelectProduct", "OpenOrder"]);
    assert_eq!(b.connectors, a.connectors);
}

#[test]
fn connector_free_component_moves_alone() {
    let a = fixtures::eshop();
    let a = create(&a, None, "Box", ComponentKind::Plain).unwrap().architecture;
    let a = create(&a, None, "Lone", ComponentKind::Plain).unwrap().architecture;
    let b = move_in(&a, &path("Lone"), &path("Box")).unwrap().architecture;
    assert_eq!(b.attachments, a.attachments);
    assert!(b.bindings.is_empty());
    assert!(b.component(&path("Box/Lone")).is_some());
    let back = move_out(&b, &path("Box/Lone")).unwrap().architecture;
    assert_eq!(back, a);
}

#[test]
fn move_out_then_in_round_trips() {
    let cs = fixtures::eshop_client_server();
    let out = move_out(&cs, &path("Server/Order")).unwrap();
    assert_preserved(&cs, &out);
    let back = move_in(&out.architecture, &path("Order"), &path("Server")).unwrap();
    assert_preserved(&out.architecture, &back);
    let b = &back.architecture;
    assert!(b.port(&port("Server#Cancel")).is_none(), "unattached relay is dissolved");
    let redelegated = delegate_port(b, &port("Server/Order#Cancel")).unwrap().architecture;
    assert_eq!(normalized(&redelegated), normalized(&cs));
}

#[test]
fn move_out_of_top_level_fails() {
    assert!(matches!(
        move_out(&fixtures::eshop(), &path("Order")),
        Err(EvolutionError::Precondition(_))
    ));
}

#[test]
fn delegating_a_required_port_mirrors_direction() {
    let a = fixtures::eshop_client_server();
    let b = delegate_port(&a, &port("Client/Customer#Pwd")).unwrap().architecture;
    let p = b.port(&port("Client#Pwd")).unwrap();
    assert_eq!(p.direction, cosa::PortDirection::Required);
    assert!(b
        .bindings
        .iter()
        .any(|x| x.outer == port("Client#Pwd") && x.inner == port("Client/Customer#Pwd")));
}

#[test]
fn case_study_steps_preserve_dependencies() {
    let mut a = fixtures::eshop();
    let steps: Vec<Box<dyn Fn(&Architecture) -> Result<archevol_core::evolution::Evolution, EvolutionError>>> = vec![
        Box::new(|a| create(a, None, "Server", ComponentKind::Server)),
        Box::new(|a| create(a, None, "Client", ComponentKind::Client)),
        Box::new(|a| move_in(a, &path("Order"), &path("Server"))),
        Box::new(|a| move_in(a, &path("Product"), &path("Client"))),
        Box::new(|a| move_in(a, &path("Customer"), &path("Client"))),
        Box::new(|a| split_component(a, &path("Client/Product"), &strings(&["OpenOrder"]), Some("Product_Server"))),
        Box::new(|a| move_out(a, &path("Client/Product_Server"))),
        Box::new(|a| move_in(a, &path("Product_Server"), &path("Server"))),
        Box::new(|a| delegate_port(a, &port("Server/Order#Cancel"))),
    ];
    for step in steps {
        let ev = step(&a).unwrap();
        assert_preserved(&a, &ev);
        a = ev.architecture;
    }
    assert_eq!(a, fixtures::eshop_client_server());
}

/// Rule-level counterpart of `move_in` into a server or client: the move
/// rule for `comp`, then the delegation rules for each of its ports whose
/// connector leaves the container.
fn move_in_by_rules(a: &Architecture, comp: &str, container: &str, server: bool) -> Architecture {
    let tg = cosa::cosa_type_graph();
    let (mv, dp, dr) = if server {
        (rules::move_component_to_server(), rules::delegate_prov_port_to_server(), rules::delegate_req_port_to_server())
    } else {
        (rules::move_component_to_client(), rules::delegate_prov_port_to_client(), rules::delegate_req_port_to_client())
    };
    let enc = cosa::encode_indexed(a).unwrap();
    let target = enc.components[&path(comp)];
    let m = find_matches(&mv, &enc.graph, tg, &Bindings::new())
        .unwrap()
        .into_iter()
        .find(|m| m.embedding.node(NodeId(4)) == Some(target))
        .expect("move rule applies");
    let mut g = apply(&mv, &enc.graph, &m).unwrap();
    let inside: BTreeSet<PortRef> = a
        .port_refs()
        .into_iter()
        .filter(|p| p.component == path(comp) || p.component.parent().as_ref() == Some(&path(container)))
        .collect();
    let leaving: BTreeSet<_> = a
        .attachments
        .iter()
        .filter(|x| x.port.component == path(comp))
        .filter(|x| {
            a.attachments
                .iter()
                .filter(|y| y.role.connector == x.role.connector && y.role != x.role)
                .any(|y| !inside.contains(&y.port))
        })
        .map(|x| enc.roles[&x.role])
        .collect();
    loop {
        let next = [&dp, &dr].into_iter().find_map(|r| {
            find_matches(r, &g, tg, &Bindings::new())
                .unwrap()
                .into_iter()
                .find(|m| m.embedding.node(NodeId(4)) == Some(target) && leaving.contains(&m.embedding.node(NodeId(8)).unwrap()))
                .map(|m| (r, m))
        });
        let Some((r, m)) = next else { break };
        g = apply(r, &g, &m).unwrap();
    }
    cosa::decode(&g, &a.name).unwrap()
}

fn normalized(a: &Architecture) -> String {
    let mut a = a.clone();
    a.attachments.sort_by(|x, y| (&x.role, &x.port).cmp(&(&y.role, &y.port)));
    a.bindings.sort_by(|x, y| (&x.outer, &x.inner).cmp(&(&y.outer, &y.inner)));
    a.uses.sort_by(|x, y| (&x.from, &x.to).cmp(&(&y.from, &y.to)));
    fn sort(cs: &mut Vec<cosa::Component>) {
        cs.sort_by(|x, y| x.name.cmp(&y.name));
        for c in cs.iter_mut() {
            c.ports.sort_by(|x, y| x.name.cmp(&y.name));
            if let Some(k) = c.configuration.as_mut() {
                sort(k);
            }
        }
    }
    sort(&mut a.components);
    a.connectors.sort_by(|x, y| x.name.cmp(&y.name));
    a.to_canonical()
}

#[test]
fn move_in_agrees_with_rule_application() {
    let tg = cosa::cosa_type_graph();
    let mut ops = fixtures::eshop();
    let mut by_rules = ops.clone();
    for (rule, name, kind) in [
        (rules::create_server(), "Server", ComponentKind::Server),
        (rules::create_client(), "Client", ComponentKind::Client),
    ] {
        let g = cosa::encode(&by_rules).unwrap();
        let env: Bindings = [(rules::NAME_PARAM.to_owned(), Value::from(name))].into();
        let m = find_matches(&rule, &g, tg, &env).unwrap().remove(0);
        by_rules = cosa::decode(&apply(&rule, &g, &m).unwrap(), &by_rules.name).unwrap();
        ops = create(&ops, None, name, kind).unwrap().architecture;
    }
    assert_eq!(normalized(&ops), normalized(&by_rules));
    for (comp, container, server) in [("Order", "Server", true), ("Product", "Client", false), ("Customer", "Client", false)] {
        ops = move_in(&ops, &path(comp), &path(container)).unwrap().architecture;
        by_rules = move_in_by_rules(&by_rules, comp, container, server);
        assert_eq!(normalized(&ops), normalized(&by_rules), "after moving {comp}");
    }
    assert_eq!(
        ops.attached_port(&RoleRef::new("Bill", "prov")),
        Some(&port("Client#Bill"))
    );
}

#[test]
fn oracle_matches_library_reachability_on_fixtures() {
    for a in [fixtures::eshop(), fixtures::eshop_client_server()] {
        assert_eq!(reachability_oracle(&a), dependency_reachability(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_operations_preserve_dependencies(seed in any::<u64>(), steps in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = random_architecture(&mut rng);
        prop_assert!(a.validate().is_ok());
        for _ in 0..steps {
            let Some(op) = random_operation(&a, &mut rng) else { continue };
            match op.apply(&a) {
                Ok(ev) => {
                    let (gained, lost) = reachability_diff(&a, &ev.architecture, &ev.relocated);
                    prop_assert!(gained.is_empty() && lost.is_empty(), "{op}: gained {gained:?}, lost {lost:?}");
                    prop_assert_eq!(reachability_oracle(&ev.architecture), dependency_reachability(&ev.architecture));
                    a = ev.architecture;
                }
                Err(EvolutionError::Precondition(_) | EvolutionError::Collision(_) | EvolutionError::NotFound { .. }) => {}
                Err(e) => prop_assert!(false, "{op}: {e}"),
            }
        }
    }

    #[test]
    fn split_then_merge_is_neutral(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_architecture(&mut rng);
        let c = a.components[0].clone();
        prop_assume!(c.ports.len() >= 2);
        let part = vec![c.ports[0].name.clone()];
        let comp = ComponentPath::top(&c.name);
        let split = split_component(&a, &comp, &part, Some("Half")).unwrap();
        let merged = merge_components(&split.architecture, &[comp.clone(), comp.sibling("Half")], &c.name).unwrap();
        prop_assert_eq!(merged.architecture.connectors.len(), a.connectors.len());
        let original: BTreeSet<PortRef> = a.port_refs().into_iter().collect();
        let after: BTreeSet<_> = reachability_oracle(&merged.architecture)
            .into_iter()
            .filter(|(p, q)| original.contains(p) && original.contains(q))
            .collect();
        prop_assert_eq!(after, reachability_oracle(&a));
    }
}
