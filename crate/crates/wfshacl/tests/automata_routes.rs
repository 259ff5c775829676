//! The automata route against the direct bounded search and against
//! well-founded validation, on random small inputs.

mod common;

use std::time::Instant;

use rand::Rng;

use common::*;
use wfshacl::analysis::doc_sat_bounded;
use wfshacl::analysis::shape_sat_bounded;
use wfshacl::automata::{doc_sat_via_automata, graph_accepted, shape_sat_via_automata, Variant};
use wfshacl::wf::{validate_document, well_founded_model};

fn small_shape() -> SetShape<'static> {
    SetShape { defs: 3, concepts: &["A"], roles: &["r"], nominals: &[], inverses: true }
}

#[test]
fn emptiness_agrees_with_direct_search_on_random_sets() {
    let start = Instant::now();
    let mut rng = rng(71);
    let mut found = 0;
    for round in 0..100 {
        let defs = rng.gen_range(1..=4);
        let nominals: &[&str] = if rng.gen_bool(0.3) { &["a"] } else { &[] };
        let k = SetShape { defs, nominals, ..small_shape() };
        let c = random_normal_set(&mut rng, &k);
        let s = head(rng.gen_range(0..defs));
        let bound = 3;
        let direct = shape_sat_bounded(&c, &s, bound).unwrap();
        let via = shape_sat_via_automata(&c, &s, bound, Variant::Anchored).unwrap();
        assert_eq!(direct.found(), via.found(), "round {round}: {c:?}, {s}");
        if let Some(g) = via.witness() {
            found += 1;
            let cs = c.restrict_to(&s).unwrap();
            assert!(!well_founded_model(g, &cs).unwrap().model.extension(&s).is_empty(), "round {round}: witness {g:?} does not validate");
        }
    }
    assert!(found > 10 && found < 90, "the battery should mix both verdicts, got {found} witnesses");
    eprintln!("100 instances in {:?}", start.elapsed());
}

#[test]
fn acceptance_matches_validation_on_random_graphs() {
    let mut rng = rng(72);
    for round in 0..100 {
        let defs = rng.gen_range(1..=3);
        let k = SetShape { defs, ..small_shape() };
        let c = random_normal_set(&mut rng, &k);
        let s = head(rng.gen_range(0..defs));
        let cs = c.restrict_to(&s).unwrap();
        let n = rng.gen_range(1..=3);
        let g = random_graph(&mut rng, n, &["A"], &["r"], 0.4);
        let wf = !well_founded_model(&g, &cs).unwrap().model.extension(&s).is_empty();
        assert_eq!(graph_accepted(&cs, &s, &g, Variant::Anchored).unwrap(), wf, "round {round}: {cs:?}, {s} on {g:?}");
    }
}

#[test]
fn document_automata_agree_with_direct_search() {
    let mut rng = rng(73);
    for round in 0..40 {
        let k = SetShape { defs: 2, concepts: &["A"], roles: &["r"], nominals: &[], inverses: true };
        let d = random_document(&mut rng, &k, 2);
        if d.individuals().len() > 1 {
            continue;
        }
        let direct = doc_sat_bounded(&d, 2).unwrap();
        let via = doc_sat_via_automata(&d, 2, Variant::Anchored).unwrap();
        assert_eq!(direct.found(), via.found(), "round {round}: {d:?}");
        if let Some(g) = via.witness() {
            assert!(validate_document(g, &d).unwrap(), "round {round}");
        }
    }
}
