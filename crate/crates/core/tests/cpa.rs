use std::collections::BTreeSet;

use archevol_core::analysis::{cpa_matrix, ConflictKind};
use archevol_core::cosa::rules::*;
use archevol_core::styles::client_server_style;

fn short(name: &str) -> &'static str {
    match name {
        CREATE_SERVER => "CS",
        CREATE_CLIENT => "CC",
        MOVE_TO_SERVER => "MS",
        MOVE_TO_CLIENT => "MC",
        DELEGATE_PROV_TO_SERVER => "DPS",
        DELEGATE_REQ_TO_SERVER => "DRS",
        DELEGATE_PROV_TO_CLIENT => "DPC",
        DELEGATE_REQ_TO_CLIENT => "DRC",
        _ => unreachable!(),
    }
}

#[test]
fn client_server_matrix() {
    let opts = client_server_style().cpa_options().unwrap();
    let t = std::time::Instant::now();
    let m = cpa_matrix(&client_server_rules(), &opts).unwrap();
    eprintln!("{:?}\n{}", t.elapsed(), m.to_table());
    let mut conflicts = BTreeSet::new();
    let mut deps = BTreeSet::new();
    for c in &m.cells {
        for k in c.kinds() {
            let key = (short(&c.first), short(&c.second), k);
            if k.is_conflict() {
                conflicts.insert(key);
            } else {
                deps.insert(key);
            }
        }
    }
    let pf = ConflictKind::ProduceForbid;
    let pu = ConflictKind::ProduceUse;
    assert_eq!(
        conflicts,
        BTreeSet::from([
            ("CS", "CS", pf),
            ("MS", "MS", pf),
            ("MC", "MC", pf),
            ("MS", "MC", pf),
            ("MC", "MS", pf),
        ])
    );
    assert_eq!(
        deps,
        BTreeSet::from([
            ("CS", "MS", pu),
            ("CC", "MC", pu),
            ("MS", "DPS", pu),
            ("MS", "DRS", pu),
            ("MC", "DPC", pu),
            ("MC", "DRC", pu),
        ])
    );
}

#[test]
fn conflict_kinds_in_the_matrix_are_produce_forbid() {
    let opts = client_server_style().cpa_options().unwrap();
    let m = cpa_matrix(&client_server_rules(), &opts).unwrap();
    for c in m.cells.iter().filter(|c| c.has_conflict()) {
        assert!(c.kinds().iter().all(|k| !k.is_conflict() || *k == ConflictKind::ProduceForbid));
    }
}
