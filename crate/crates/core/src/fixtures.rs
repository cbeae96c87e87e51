//! Reference architectures shipped with the crate.

use crate::cosa::Architecture;

/// Monolithic e-shop: Product, Customer and Order joined by four connectors.
pub const ESHOP: &str = include_str!("../fixtures/eshop.arch");
/// The e-shop after introducing the client-server style.
pub const ESHOP_CLIENT_SERVER: &str = include_str!("../fixtures/eshop-cs.arch");
/// Architect decisions that turn the e-shop into the client-server version.
pub const ESHOP_DECISIONS: &str = include_str!("../fixtures/eshop-decisions.json");
pub const EMPTY: &str = include_str!("../fixtures/empty.arch");
/// A provided port bound to a required child port.
pub const BROKEN_BINDING: &str = include_str!("../fixtures/broken-binding.arch");

pub fn eshop() -> Architecture {
    Architecture::from_document(ESHOP).expect("fixture parses")
}

pub fn eshop_client_server() -> Architecture {
    Architecture::from_document(ESHOP_CLIENT_SERVER).expect("fixture parses")
}

/// The eight client-server rules as a rule-set document.
pub const CLIENT_SERVER_RULES: &str = include_str!("../fixtures/client-server.rules");
/// The client-server style document.
pub const CLIENT_SERVER_STYLE: &str = include_str!("../fixtures/client-server.style");

/// Every shipped fixture with its file name.
pub const ALL: [(&str, &str); 7] = [
    ("eshop.arch", ESHOP),
    ("eshop-cs.arch", ESHOP_CLIENT_SERVER),
    ("empty.arch", EMPTY),
    ("broken-binding.arch", BROKEN_BINDING),
    ("eshop-decisions.json", ESHOP_DECISIONS),
    ("client-server.rules", CLIENT_SERVER_RULES),
    ("client-server.style", CLIENT_SERVER_STYLE),
];
