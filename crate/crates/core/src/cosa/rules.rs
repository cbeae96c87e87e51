//! The eight rules introducing a server or clients and moving components
//! into them.

use super::metamodel::{ty, Pat};
use crate::graph::AttrKind;
use crate::rewrite::{Nac, Rule};

pub const CREATE_SERVER: &str = "CreateServer";
pub const CREATE_CLIENT: &str = "CreateClient";
pub const MOVE_TO_SERVER: &str = "MoveComponentToServer";
pub const MOVE_TO_CLIENT: &str = "MoveComponentToClient";
pub const DELEGATE_PROV_TO_SERVER: &str = "DelegateProvPortToServer";
pub const DELEGATE_REQ_TO_SERVER: &str = "DelegateReqPortToServer";
pub const DELEGATE_PROV_TO_CLIENT: &str = "DelegateProvPortToClient";
pub const DELEGATE_REQ_TO_CLIENT: &str = "DelegateReqPortToClient";

/// Parameter naming the created component.
pub const NAME_PARAM: &str = "name";

fn create(rule: &str, kind: &str, unique: bool) -> Rule {
    let rhs = Pat::new()
        .named(1, kind, NAME_PARAM)
        .named(2, ty::CONFIGURATION, NAME_PARAM)
        .e(3, ty::HAS_CONFIG, 1, 2)
        .done();
    let nacs = if unique {
        vec![Nac {
            name: format!("No{kind}"),
            pattern: Pat::new().n(1, kind).done(),
        }]
    } else {
        vec![]
    };
    Rule::new(
        rule,
        Pat::new().done(),
        rhs,
        nacs,
        vec![(NAME_PARAM.to_owned(), AttrKind::String)],
    )
    .expect("well-formed rule")
}

/// `1` container of kind `kind` with configuration `2`, and component `4`.
fn move_lhs(kind: &str) -> Pat {
    Pat::new()
        .n(1, kind)
        .n(2, ty::CONFIGURATION)
        .e(3, ty::HAS_CONFIG, 1, 2)
        .n(4, ty::COMPONENT)
}

fn move_into(rule: &str, kind: &str) -> Rule {
    let lhs = move_lhs(kind);
    let rhs = lhs.clone().e(5, ty::CONTAINS, 2, 4);
    let nacs = vec![
        Nac {
            name: "NoContainment".into(),
            pattern: lhs.clone().n(6, ty::CONFIGURATION).e(7, ty::CONTAINS, 6, 4).done(),
        },
        Nac {
            name: "AlreadyContained".into(),
            pattern: lhs.clone().e(5, ty::CONTAINS, 2, 4).done(),
        },
        Nac {
            name: "IsClient".into(),
            pattern: lhs.clone().retype(4, ty::CLIENT).done(),
        },
        Nac {
            name: "IsServer".into(),
            pattern: lhs.clone().retype(4, ty::SERVER).done(),
        },
    ];
    Rule::new(rule, lhs.done(), rhs.done(), nacs, vec![]).expect("well-formed rule")
}

/// Moves the attachment of a contained component's port to a fresh port of
/// the same direction on the container, bound to the inner port.
fn delegate(rule: &str, kind: &str, port: &str, role: &str) -> Rule {
    let lhs = move_lhs(kind)
        .e(5, ty::CONTAINS, 2, 4)
        .named(6, port, "x")
        .e(7, ty::HAS_PORT, 4, 6)
        .n(8, role)
        .e(9, ty::ATTACHMENT, 6, 8);
    let rhs = move_lhs(kind)
        .e(5, ty::CONTAINS, 2, 4)
        .named(6, port, "x")
        .e(7, ty::HAS_PORT, 4, 6)
        .n(8, role)
        .named(10, port, "x")
        .e(11, ty::HAS_PORT, 1, 10)
        .e(12, ty::BINDING, 10, 6)
        .e(13, ty::ATTACHMENT, 10, 8);
    Rule::new(rule, lhs.done(), rhs.done(), vec![], vec![]).expect("well-formed rule")
}

pub fn create_server() -> Rule {
    create(CREATE_SERVER, ty::SERVER, true)
}

pub fn create_client() -> Rule {
    create(CREATE_CLIENT, ty::CLIENT, false)
}

pub fn move_component_to_server() -> Rule {
    move_into(MOVE_TO_SERVER, ty::SERVER)
}

pub fn move_component_to_client() -> Rule {
    move_into(MOVE_TO_CLIENT, ty::CLIENT)
}

pub fn delegate_prov_port_to_server() -> Rule {
    delegate(DELEGATE_PROV_TO_SERVER, ty::SERVER, ty::PROV_PORT, ty::PROV_ROLE)
}

pub fn delegate_req_port_to_server() -> Rule {
    delegate(DELEGATE_REQ_TO_SERVER, ty::SERVER, ty::REQ_PORT, ty::REQ_ROLE)
}

pub fn delegate_prov_port_to_client() -> Rule {
    delegate(DELEGATE_PROV_TO_CLIENT, ty::CLIENT, ty::PROV_PORT, ty::PROV_ROLE)
}

pub fn delegate_req_port_to_client() -> Rule {
    delegate(DELEGATE_REQ_TO_CLIENT, ty::CLIENT, ty::REQ_PORT, ty::REQ_ROLE)
}

/// All eight rules, server side first.
pub fn client_server_rules() -> Vec<Rule> {
    vec![
        create_server(),
        create_client(),
        move_component_to_server(),
        move_component_to_client(),
        delegate_prov_port_to_server(),
        delegate_req_port_to_server(),
        delegate_prov_port_to_client(),
        delegate_req_port_to_client(),
    ]
}

pub fn rule_by_name(name: &str) -> Option<Rule> {
    client_server_rules().into_iter().find(|r| r.name() == name)
}

/// Sequence moving components into a new server.
pub const SERVER_INTRO: &str =
    "CreateServer; (MoveComponentToServer)*; (DelegateProvPortToServer)*; (DelegateReqPortToServer)*";

/// Client-side mirror of [`SERVER_INTRO`].
pub const CLIENT_INTRO: &str =
    "CreateClient; (MoveComponentToClient)*; (DelegateProvPortToClient)*; (DelegateReqPortToClient)*";
