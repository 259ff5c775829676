//! Evaluation, approximants, cleaning and dualization of μ-calculus formulas.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use common::*;
use wfshacl::mu::{approximant, eval, MuError, MuFormula, Valuation, Var};
use wfshacl::translate::translate;
use wfshacl::{ConstraintSet, DataGraph, NodeId, ShapeName};

fn f(text: &str) -> MuFormula {
    MuFormula::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn nodes(ids: &[&str]) -> BTreeSet<NodeId> {
    ids.iter().map(|a| NodeId::new(*a)).collect()
}

fn ev(phi: &MuFormula, g: &DataGraph) -> BTreeSet<NodeId> {
    eval(phi, g, &Valuation::new()).unwrap()
}

/// Random graphs for the batteries, over the names used by the generators.
fn random_battery_graph(rng: &mut rand::rngs::StdRng) -> DataGraph {
    let n = rng.gen_range(1..=6);
    let mut g = random_graph(rng, n, &["A", "B"], &["p", "r"], 0.35);
    // Keep the nominal individual in the domain.
    g.add_concept("B", "0");
    g
}

#[test]
fn translation_of_example_set_holds_everywhere_on_chain() {
    let phi = translate(&c_ex1(), &ShapeName::new("s")).unwrap();
    assert_eq!(ev(&phi, &g1()), g1().domain());
}

#[test]
fn degenerate_fixpoints() {
    let g = g1();
    assert!(ev(&f("mu X . X"), &g).is_empty());
    assert_eq!(ev(&f("nu X . X"), &g), g.domain());
}

#[test]
fn diamond_into_nominal_on_two_cycle() {
    assert_eq!(ev(&f("<p> @1"), &g2()), nodes(&["0"]));
}

#[test]
fn unbound_variable_is_an_error() {
    assert!(matches!(eval(&MuFormula::parse_free("X", &["X"]).unwrap(), &g2(), &Valuation::new()), Err(MuError::UnboundVariable(_))));
    let mut v = Valuation::new();
    v.insert(Var::new("X"), nodes(&["1"]));
    assert_eq!(eval(&MuFormula::parse_free("X", &["X"]).unwrap(), &g2(), &v).unwrap(), nodes(&["1"]));
}

#[test]
fn approximant_examples() {
    let g = g1();
    let v = Valuation::new();
    let reach = f("mu X . (A | <p> X)");
    assert!(approximant(&reach, 0, &g, &v).unwrap().is_empty());
    assert_eq!(approximant(&f("nu X . [p] X"), 0, &g, &v).unwrap(), g.domain());
    assert_eq!(approximant(&reach, 2, &g, &v).unwrap(), nodes(&["5", "6"]));
}

#[test]
fn cleaning_examples() {
    assert_eq!(f("mu X_s . A").clean(), f("A"));
    let reach = f("mu X . (A | <p> X)");
    assert_eq!(reach.clean(), reach);
    let c = ConstraintSet::parse("s <- !s1\ns1 <- all r . s1 | !s2\ns2 <- all r- . s2").unwrap();
    let clean = translate(&c, &ShapeName::new("s")).unwrap().clean();
    assert!(clean.alpha_eq(&f("nu X . (<r> X & mu Y . [r-] Y)")), "{clean}");
}

#[test]
fn dualization_examples() {
    assert_eq!(f("A").dualize().unwrap(), f("!A"));
    assert_eq!(f("mu X . (A | <p> X)").dualize().unwrap(), f("nu X . (!A & [p] X)"));
    assert!(matches!(MuFormula::parse_free("X", &["X"]).unwrap().dualize(), Err(MuError::FreeVariable(_))));
}

#[test]
fn dualize_is_an_involution_and_complements() {
    let mut rng = rng(41);
    for _ in 0..100 {
        let phi = random_closed_formula(&mut rng, &["A", "B"], &["p", "r"], &["0"], 4);
        let dual = phi.dualize().unwrap();
        assert_eq!(dual.dualize().unwrap(), phi);
        let g = random_battery_graph(&mut rng);
        let a = ev(&phi, &g);
        let b = ev(&dual, &g);
        assert!(a.is_disjoint(&b), "{phi}");
        let union: BTreeSet<NodeId> = a.union(&b).cloned().collect();
        assert_eq!(union, g.domain(), "{phi}");
    }
}

#[test]
fn approximant_chains_are_monotone() {
    let mut rng = rng(42);
    let mut checked = 0;
    while checked < 200 {
        let phi = random_closed_formula(&mut rng, &["A", "B"], &["p", "r"], &["0"], 4);
        if !matches!(phi, MuFormula::Mu(..) | MuFormula::Nu(..)) {
            continue;
        }
        checked += 1;
        let g = random_battery_graph(&mut rng);
        let v = Valuation::new();
        let least = matches!(phi, MuFormula::Mu(..));
        let mut prev = approximant(&phi, 0, &g, &v).unwrap();
        for alpha in 1..=g.domain().len() + 1 {
            let next = approximant(&phi, alpha, &g, &v).unwrap();
            if least {
                assert!(prev.is_subset(&next), "{phi} at {alpha}");
            } else {
                assert!(next.is_subset(&prev), "{phi} at {alpha}");
            }
            prev = next;
        }
        assert_eq!(prev, ev(&phi, &g), "{phi}: chain does not reach the fixpoint");
    }
}

#[test]
fn fixpoints_are_fixed_points_of_their_body() {
    let mut rng = rng(43);
    let mut checked = 0;
    while checked < 200 {
        let phi = random_closed_formula(&mut rng, &["A", "B"], &["p", "r"], &["0"], 4);
        let (x, body) = match &phi {
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => (x.clone(), b.as_ref().clone()),
            _ => continue,
        };
        checked += 1;
        let g = random_battery_graph(&mut rng);
        let fix = ev(&phi, &g);
        let mut v: Valuation = BTreeMap::new();
        v.insert(x, fix.clone());
        assert_eq!(eval(&body, &g, &v).unwrap(), fix, "{phi}");
    }
}

#[test]
fn cleaning_preserves_semantics_and_is_idempotent() {
    let mut rng = rng(44);
    for _ in 0..200 {
        let phi = random_closed_formula(&mut rng, &["A", "B"], &["p", "r"], &["0"], 5);
        let clean = phi.clean();
        assert!(clean.is_clean());
        assert_eq!(clean.clean(), clean);
        let g = random_battery_graph(&mut rng);
        assert_eq!(ev(&clean, &g), ev(&phi, &g), "{phi}");
    }
}

#[test]
fn text_format_round_trips() {
    let mut rng = rng(45);
    for _ in 0..200 {
        let phi = random_closed_formula(&mut rng, &["A", "B"], &["p", "r"], &["0"], 5);
        let again = MuFormula::parse(&phi.to_string()).unwrap_or_else(|e| panic!("{phi}: {e}"));
        assert_eq!(again, phi);
    }
}
