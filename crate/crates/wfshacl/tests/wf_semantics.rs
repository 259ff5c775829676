//! Three-valued evaluation, the T/U/W operators, the well-founded model and
//! target validation, checked against worked examples and an independent
//! alternating-fixpoint oracle.

mod common;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::Rng;

use common::*;
use wfshacl::wf::{
    eval_expr, greatest_unfounded, is_unfounded, t_operator, validate_document, validates, w_operator, well_founded_model, Atom, Polarity,
    ShapeAssignment,
};
use wfshacl::{ConstraintSet, DataGraph, Document, NodeId, ShapeExpr, ShapeName};

fn nodes(ids: &[&str]) -> BTreeSet<NodeId> {
    ids.iter().map(|a| NodeId::new(*a)).collect()
}

fn atoms(items: &[(&str, &str)]) -> BTreeSet<Atom> {
    items.iter().map(|(s, a)| (ShapeName::new(*s), NodeId::new(*a))).collect()
}

fn assignment(text: &str) -> ShapeAssignment {
    ShapeAssignment::parse(text).unwrap()
}

/// A random subset of the literals of `s`.
fn random_subassignment(rng: &mut StdRng, s: &ShapeAssignment) -> ShapeAssignment {
    let keep = |rng: &mut StdRng| rng.gen_bool(0.5);
    let pos: Vec<Atom> = s.positive.iter().filter(|_| keep(rng)).cloned().collect();
    let neg: Vec<Atom> = s.negative.iter().filter(|_| keep(rng)).cloned().collect();
    ShapeAssignment::from_parts(pos, neg)
}

fn random_instance(rng: &mut StdRng, defs: usize) -> (DataGraph, ConstraintSet) {
    let k = SetShape { defs, concepts: &["A", "B"], roles: &["p", "r"], nominals: &["0"], inverses: true };
    let n = rng.gen_range(1..=5);
    let g = random_graph(rng, n, &["A", "B"], &["p", "r"], 0.35);
    let c = if rng.gen_bool(0.5) { random_normal_set(rng, &k) } else { random_nested_set(rng, &k, 2) };
    (g, c)
}

#[test]
fn lower_eval_of_example_body_on_empty_assignment() {
    let phi = ShapeExpr::parse("A | some p . !t").unwrap();
    assert_eq!(eval_expr(&phi, &g1(), &ShapeAssignment::new(), Polarity::Lower), nodes(&["6"]));
}

#[test]
fn upper_eval_of_negation_on_empty_assignment_is_domain() {
    let phi = ShapeExpr::parse("!t").unwrap();
    assert_eq!(eval_expr(&phi, &g1(), &ShapeAssignment::new(), Polarity::Upper), g1().domain());
}

#[test]
fn lower_eval_of_existential_negation() {
    let phi = ShapeExpr::parse("some p . !t").unwrap();
    assert_eq!(eval_expr(&phi, &g1(), &assignment("¬t(6)"), Polarity::Lower), nodes(&["5"]));
}

#[test]
fn bounds_of_shape_literals_follow_the_assignment() {
    let g = g1();
    let s = assignment("s(1) ¬s(2)");
    let pos = ShapeExpr::shape("s");
    let neg = ShapeExpr::not_shape("s");
    let all_but_2: BTreeSet<NodeId> = g.domain().into_iter().filter(|a| a.as_str() != "2").collect();
    let all_but_1: BTreeSet<NodeId> = g.domain().into_iter().filter(|a| a.as_str() != "1").collect();
    assert_eq!(eval_expr(&pos, &g, &s, Polarity::Lower), nodes(&["1"]));
    assert_eq!(eval_expr(&pos, &g, &s, Polarity::Upper), all_but_2);
    assert_eq!(eval_expr(&neg, &g, &s, Polarity::Lower), nodes(&["2"]));
    assert_eq!(eval_expr(&neg, &g, &s, Polarity::Upper), all_but_1);
}

#[test]
fn universal_ranges_over_the_domain() {
    let g = DataGraph::parse("p(0,1) A(1) B(2)").unwrap();
    let phi = ShapeExpr::parse("all p . A").unwrap();
    assert_eq!(eval_expr(&phi, &g, &ShapeAssignment::new(), Polarity::Lower), nodes(&["0", "1", "2"]));
}

#[test]
fn t_operator_examples() {
    assert_eq!(t_operator(&g1(), &c_ex1(), &ShapeAssignment::new()), atoms(&[("s", "6")]));
    assert!(t_operator(&g1(), &ConstraintSet::new(), &assignment("s(1)")).is_empty());
    assert!(t_operator(&g2(), &c_ex1(), &ShapeAssignment::new()).is_empty());
}

#[test]
fn greatest_unfounded_on_chain_after_first_step() {
    let u = greatest_unfounded(&g1(), &c_ex1(), &assignment("s(6)"));
    assert!(u.contains(&(ShapeName::new("t"), NodeId::new("6"))));
    for i in 0..6 {
        assert!(!u.contains(&(ShapeName::new("t"), NodeId::new(i.to_string()))), "t({i}) must not be unfounded yet");
    }
}

#[test]
fn greatest_unfounded_on_two_cycle_is_empty() {
    assert!(greatest_unfounded(&g2(), &c_ex1(), &ShapeAssignment::new()).is_empty());
}

#[test]
fn greatest_unfounded_of_nominal_shape_matches_brute_force() {
    let g = DataGraph::parse("A(b) B(a)").unwrap();
    let c = ConstraintSet::parse("s <- <a>").unwrap();
    let empty = ShapeAssignment::new();
    let u = greatest_unfounded(&g, &c, &empty);
    assert_eq!(u, atoms(&[("s", "b")]));
    let universe: Vec<Atom> = atoms(&[("s", "a"), ("s", "b")]).into_iter().collect();
    let mut union = BTreeSet::new();
    for mask in 0..4u32 {
        let cand: BTreeSet<Atom> = universe.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a.clone()).collect();
        if is_unfounded(&g, &c, &empty, &cand) {
            union.extend(cand);
        }
    }
    assert_eq!(u, union);
}

#[test]
fn w_operator_iterates_on_chain() {
    let (g, c) = (g1(), c_ex1());
    let s1 = w_operator(&g, &c, &ShapeAssignment::new()).unwrap();
    assert_eq!(s1, assignment("s(6)"));
    let s2 = w_operator(&g, &c, &s1).unwrap();
    assert_eq!(s2, assignment("s(6) ¬t(6)"));
    let s3 = w_operator(&g, &c, &s2).unwrap();
    let s4 = w_operator(&g, &c, &s3).unwrap();
    assert_eq!(s4, assignment("s(6) s(5) ¬t(6) ¬t(5)"));
}

#[test]
fn golden_trace_on_chain() {
    let wf = well_founded_model(&g1(), &c_ex1()).unwrap();
    let lines = wf.trace.lines();
    assert_eq!(&lines[..4], ["1: s(6)", "2: s(6) ¬t(6)", "3: s(5) s(6) ¬t(6)", "4: s(5) s(6) ¬t(5) ¬t(6)"]);
    assert!(wf.model.holds(&ShapeName::new("s"), &NodeId::new("0")));
}

#[test]
fn two_cycle_has_empty_model() {
    assert!(well_founded_model(&g2(), &c_ex1()).unwrap().model.is_empty());
}

#[test]
fn single_stratum_model_is_total() {
    let g = DataGraph::parse("A(a) B(b)").unwrap();
    let c = ConstraintSet::parse("s <- A").unwrap();
    assert_eq!(well_founded_model(&g, &c).unwrap().model, assignment("s(a) ¬s(b)"));
}

#[test]
fn validation_examples() {
    let d = fixture_doc("ex1.shacl");
    let m1 = well_founded_model(&g1(), &d.constraints).unwrap().model;
    assert!(validates(&g1(), &d, &m1).unwrap());
    let m2 = well_founded_model(&g2(), &d.constraints).unwrap().model;
    assert!(!validates(&g2(), &d, &m2).unwrap());
    let vacuous = Document::new(d.constraints.clone(), vec![]).unwrap();
    assert!(validates(&g2(), &vacuous, &ShapeAssignment::new()).unwrap());
    assert!(validate_document(&g1(), &d).unwrap());
    assert!(!validate_document(&g2(), &d).unwrap());
}

#[test]
fn validation_rejects_incompatible_graphs() {
    let d = Document::parse("s <- A\ntarget node <z> s").unwrap();
    assert!(validate_document(&g2(), &d).is_err());
}

#[test]
fn class_and_role_targets() {
    let d = fixture_doc("class_targets.shacl");
    let good = DataGraph::parse("A(0) r(0,1) B(1)").unwrap();
    let bad_class = DataGraph::parse("A(0) r(0,1)").unwrap();
    let bad_role = DataGraph::parse("A(0) r(0,1) B(1) C(0)").unwrap();
    assert!(validate_document(&good, &d).unwrap());
    assert!(!validate_document(&bad_class, &d).unwrap());
    assert!(!validate_document(&bad_role, &d).unwrap());
}

#[test]
fn wf_model_matches_alternating_fixpoint_oracle() {
    let mut rng = rng(21);
    for round in 0..200 {
        let defs = rng.gen_range(1..=4);
        let (g, c) = random_instance(&mut rng, defs);
        let got = well_founded_model(&g, &c).unwrap().model;
        let want = wf_oracle(&g, &c);
        assert_eq!(got, want, "round {round}: {c:?} on {g:?}");
    }
}

#[test]
fn w_is_monotone_on_sound_assignments() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let (g, c) = random_instance(&mut rng, 3);
        let wf = well_founded_model(&g, &c).unwrap().model;
        let big = random_subassignment(&mut rng, &wf);
        let small = random_subassignment(&mut rng, &big);
        let w_small = w_operator(&g, &c, &small).unwrap();
        let w_big = w_operator(&g, &c, &big).unwrap();
        assert!(w_small.is_subset(&w_big), "W({small:?}) ⊄ W({big:?})");
    }
}

#[test]
fn unfounded_sets_are_closed_under_union() {
    let mut rng = rng(23);
    for _ in 0..100 {
        let (g, c) = random_instance(&mut rng, 2);
        let wf = well_founded_model(&g, &c).unwrap().model;
        let s = random_subassignment(&mut rng, &wf);
        let universe: Vec<Atom> = c.heads().flat_map(|h| g.domain().into_iter().map(move |a| (h.clone(), a))).collect();
        let greatest = greatest_unfounded(&g, &c, &s);
        assert!(is_unfounded(&g, &c, &s, &greatest));
        let sample = |rng: &mut StdRng| -> BTreeSet<Atom> {
            let k = rng.gen_range(0..=universe.len());
            universe.iter().cloned().choose_multiple(rng, k).into_iter().collect()
        };
        for _ in 0..20 {
            let u1 = sample(&mut rng);
            let u2 = sample(&mut rng);
            let ok1 = is_unfounded(&g, &c, &s, &u1);
            let ok2 = is_unfounded(&g, &c, &s, &u2);
            if ok1 {
                assert!(u1.is_subset(&greatest));
            }
            if ok1 && ok2 {
                let union: BTreeSet<Atom> = u1.union(&u2).cloned().collect();
                assert!(is_unfounded(&g, &c, &s, &union));
            }
        }
    }
}

#[test]
fn bounds_coincide_on_total_assignments() {
    let mut rng = rng(24);
    let k = SetShape { defs: 3, concepts: &["A", "B"], roles: &["p", "r"], nominals: &["0"], inverses: true };
    for _ in 0..200 {
        let (g, c) = random_instance(&mut rng, 3);
        let totals = all_total_assignments_capped(&g, &c);
        let s = &totals[rng.gen_range(0..totals.len())];
        let phi = random_expr(&mut rng, &k, 3);
        assert_eq!(eval_expr(&phi, &g, s, Polarity::Lower), eval_expr(&phi, &g, s, Polarity::Upper), "{phi:?}");
    }
}

fn all_total_assignments_capped(g: &DataGraph, c: &ConstraintSet) -> Vec<ShapeAssignment> {
    let mut shapes: Vec<ShapeName> = c.heads().cloned().collect();
    while shapes.len() * g.domain().len() > 12 {
        shapes.pop();
    }
    let mut small = ConstraintSet::new();
    for s in &shapes {
        small.define(s.clone(), ShapeExpr::concept("A")).unwrap();
    }
    // Undefined heads beyond the cap are assigned false throughout.
    let rest: Vec<Atom> =
        c.heads().filter(|h| !shapes.contains(h)).flat_map(|h| g.domain().into_iter().map(move |a| (h.clone(), a))).collect();
    all_total_assignments(g, &small)
        .into_iter()
        .map(|s| ShapeAssignment::from_parts(s.positive.iter().cloned(), s.negative.iter().cloned().chain(rest.iter().cloned())))
        .collect()
}

#[test]
fn trace_is_an_increasing_chain() {
    let mut rng = rng(25);
    for _ in 0..200 {
        let (g, c) = random_instance(&mut rng, 4);
        let wf = well_founded_model(&g, &c).unwrap();
        let trace = &wf.trace.0;
        for w in trace.windows(2) {
            assert!(w[0].is_subset(&w[1]));
            assert_ne!(w[0], w[1]);
        }
        assert!(wf.model.is_consistent());
        assert!(trace.len() <= c.len() * g.domain().len() + 1);
        assert_eq!(trace.last().cloned().unwrap_or_default(), wf.model);
    }
}
