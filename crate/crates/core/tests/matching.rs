mod common;

use archevol_core::cosa::rules;
use archevol_core::graph::matching::Bindings;
use archevol_core::graph::Value;
use archevol_core::rewrite::find_matches;
use archevol_core::styles::client_server_style;
use common::{matcher_discrepancies, random_host, seed_patterns, structured_host};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matching_and_checking_agree_with_brute_force(seed in any::<u64>()) {
        let tg = client_server_style().type_graph().unwrap();
        let h = structured_host(&mut ChaCha8Rng::seed_from_u64(seed), &tg, 12, &seed_patterns());
        let bad = matcher_discrepancies(&h, &tg);
        prop_assert!(bad.is_empty(), "{}", bad.join("\n"));
    }
}

#[test]
fn unstructured_hosts_agree() {
    let tg = client_server_style().type_graph().unwrap();
    for seed in 0..100 {
        let h = random_host(&mut ChaCha8Rng::seed_from_u64(seed), &tg, 6);
        let bad = matcher_discrepancies(&h, &tg);
        assert!(bad.is_empty(), "seed {seed}: {}", bad.join("\n"));
    }
}

#[test]
fn structured_hosts_exercise_every_rule() {
    let tg = client_server_style().type_graph().unwrap();
    let seeds = seed_patterns();
    let env: Bindings = [(rules::NAME_PARAM.to_owned(), Value::from("a"))].into();
    let mut hits = vec![0; 8];
    for seed in 0..200 {
        let h = structured_host(&mut ChaCha8Rng::seed_from_u64(seed), &tg, 12, &seeds);
        for (i, r) in rules::client_server_rules().iter().enumerate() {
            if !find_matches(r, &h, &tg, &env).unwrap().is_empty() {
                hits[i] += 1;
            }
        }
    }
    // CreateClient has no NAC and matches everywhere.
    assert_eq!(hits[1], 200);
    for (i, n) in hits.iter().enumerate().filter(|(i, _)| *i != 1) {
        assert!((10..200).contains(n), "rule {i}: {hits:?}");
    }
}
