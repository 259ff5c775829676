//! The translation into the μ-calculus, the target formulas Θ and Λ, the
//! implication formula, and the agreement of formula evaluation with
//! well-founded validation.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;

use common::*;
use wfshacl::analysis::{crosscheck, enumerate_graphs, Signature};
use wfshacl::mu::{eval, MuFormula, Valuation};
use wfshacl::translate::{fresh_role, implication_formula, lambda, theta, translate, translate_clean, TranslateError, Translator};
use wfshacl::wf::well_founded_model;
use wfshacl::{ConstraintSet, DataGraph, Document, NodeId, RoleName, ShapeName, TargetSubject};

fn f(text: &str) -> MuFormula {
    MuFormula::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn name(s: &str) -> ShapeName {
    ShapeName::new(s)
}

fn ev(phi: &MuFormula, g: &DataGraph) -> BTreeSet<NodeId> {
    eval(phi, g, &Valuation::new()).unwrap()
}

#[test]
fn example_set_translation() {
    let raw = translate(&c_ex1(), &name("s")).unwrap();
    let want = f("mu X_s . (A | <p> nu X_~t . (X_s & [r] X_~t))");
    assert!(raw.clean().alpha_eq(&want), "{raw}");
    assert_eq!(raw.clean().to_string(), want.to_string());
    assert_eq!(ev(&raw, &g1()), g1().domain());
    assert!(ev(&raw, &g2()).is_empty());
}

#[test]
fn base_row_binds_a_vacuous_fixpoint() {
    let c = ConstraintSet::parse("s <- A").unwrap();
    assert_eq!(translate(&c, &name("s")).unwrap(), f("mu X_s . A"));
    assert_eq!(translate_clean(&c, &name("s")).unwrap(), f("A"));
}

#[test]
fn infinity_axiom_translation() {
    let c = fixture_doc("infinity_axiom.shacl").constraints;
    let clean = translate_clean(&c, &name("s")).unwrap();
    assert!(clean.alpha_eq(&f("nu X . (<r> X & mu Y . [r-] Y)")), "{clean}");
}

#[test]
fn negation_resets_to_positive_context() {
    // tr⁻ of ¬s' re-enters tr⁺ with the barred names dropped: the inner
    // reference to t is bound afresh rather than reusing the barred variable.
    let c = ConstraintSet::parse("s <- !t\nt <- !u\nu <- !t").unwrap();
    let phi = translate(&c, &name("s")).unwrap();
    assert!(phi.is_closed());
    let g = DataGraph::parse("A(0)").unwrap();
    let wf = well_founded_model(&g, &c).unwrap().model;
    assert_eq!(ev(&phi, &g), wf.extension(&name("s")));
}

#[test]
fn translations_have_limited_alternation() {
    let mut rng = rng(51);
    let k = SetShape { defs: 6, concepts: &["A", "B"], roles: &["p", "r"], nominals: &["0"], inverses: true };
    for _ in 0..300 {
        let c = random_normal_set(&mut rng, &k);
        let s = head(rng.gen_range(0..k.defs));
        let phi = translate(&c, &s).unwrap();
        assert!(phi.is_closed());
        assert_eq!(phi.check_limited_alternation(), Ok(()), "{c:?}");
    }
    for (file, d) in all_fixture_docs() {
        for s in d.constraints.heads() {
            let phi = translate(&d.constraints, s).unwrap();
            assert_eq!(phi.check_limited_alternation(), Ok(()), "{file}: {s}");
        }
    }
}

#[test]
fn translation_budget_is_enforced() {
    let c = fixture_doc("grid_c.shacl").constraints;
    let err = Translator::with_budget(5).translate_shape(&c, &name("s1")).unwrap_err();
    assert_eq!(err, TranslateError::TranslationBudget(5));
}

#[test]
fn theta_examples() {
    let d = Document::parse("s <- A\ntarget node <a> s").unwrap();
    assert_eq!(theta(&d).unwrap(), f("!@a | mu X_s . A"));
    assert_eq!(theta(&Document::empty()).unwrap(), MuFormula::Top);
    let d = Document::parse("s <- A\ntarget role r s").unwrap();
    assert_eq!(theta(&d).unwrap(), f("[r] false | mu X_s . A"));
    let d = Document::parse("s <- A\ntarget class B s").unwrap();
    assert_eq!(theta(&d).unwrap(), f("!B | mu X_s . A"));
}

#[test]
fn lambda_of_empty_document() {
    let p = fresh_role(&[&Document::empty()]);
    assert_eq!(p, RoleName::new("__fresh_p0"));
    let lam = lambda(&Document::empty(), &p).unwrap();
    assert!(lam.alpha_eq(&f("nu X . (true & [__fresh_p0-] X & [__fresh_p0] X)")), "{lam}");
}

#[test]
fn fresh_role_avoids_both_signatures() {
    let d1 = Document::parse("s <- some __fresh_p0 . s").unwrap();
    let d2 = Document::parse("t <- some __fresh_p1 . t").unwrap();
    assert_eq!(fresh_role(&[&d1, &d2]), RoleName::new("__fresh_p2"));
}

/// Nodes satisfying every applicable target, judged by well-founded validation.
fn theta_oracle(g: &DataGraph, d: &Document) -> BTreeSet<NodeId> {
    let mut ok = g.domain();
    for t in &d.targets {
        let cs = d.constraints.restrict_to(&t.shape).unwrap();
        let ext = well_founded_model(g, &cs).unwrap().model.extension(&t.shape);
        let selected: BTreeSet<NodeId> = match &t.subject {
            TargetSubject::Node(a) => [a.clone()].into_iter().collect(),
            TargetSubject::Class(_) | TargetSubject::Role(_) => t.selected_nodes(g),
        };
        ok.retain(|a| !selected.contains(a) || ext.contains(a));
    }
    ok
}

/// Connected components over the given role names, in both orientations.
fn components(g: &DataGraph, roles: &BTreeSet<RoleName>) -> Vec<BTreeSet<NodeId>> {
    let mut comp: BTreeMap<NodeId, usize> = g.domain().into_iter().enumerate().map(|(i, a)| (a, i)).collect();
    loop {
        let mut changed = false;
        for (r, a, b) in g.role_assertions() {
            if roles.contains(r) {
                let (ca, cb) = (comp[a], comp[b]);
                if ca != cb {
                    let m = ca.min(cb);
                    for v in comp.values_mut() {
                        if *v == ca || *v == cb {
                            *v = m;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (a, c) in comp {
        out.entry(c).or_default().insert(a);
    }
    out.into_values().collect()
}

#[test]
fn lambda_propagates_all_or_nothing_per_component() {
    let mut rng = rng(52);
    let k = SetShape { defs: 3, concepts: &["A", "B"], roles: &["p", "r"], nominals: &["0"], inverses: true };
    for round in 0..200 {
        let d = random_document(&mut rng, &k, 3);
        let n = rng.gen_range(1..=5);
        let mut g = random_graph(&mut rng, n, &["A", "B"], &["p", "r"], 0.4);
        make_compatible(&mut g, &d);
        let p = fresh_role(&[&d]);
        let lam = ev(&lambda(&d, &p).unwrap(), &g);
        let th = ev(&theta(&d).unwrap(), &g);
        assert_eq!(th, theta_oracle(&g, &d), "round {round}: Θ disagrees with validation");
        for comp in components(&g, &d.role_names()) {
            let all_ok = comp.is_subset(&th);
            let inside: BTreeSet<NodeId> = comp.intersection(&lam).cloned().collect();
            if all_ok {
                assert_eq!(inside, comp, "round {round}");
            } else {
                assert!(inside.is_empty(), "round {round}");
            }
        }
    }
}

#[test]
fn self_implication_formula_has_no_model_up_to_four_nodes() {
    let d = Document::parse("s <- A\ntarget node <a> s").unwrap();
    let (phi, p) = implication_formula(&d, &d).unwrap();
    assert_eq!(p, RoleName::new("__fresh_p0"));
    let required: BTreeSet<NodeId> = [NodeId::new("a")].into_iter().collect();
    let sig = Signature::new(["A"], [p.clone()]);
    let mut examined = 0;
    for g in enumerate_graphs(&sig, &required, 4) {
        examined += 1;
        assert!(ev(&phi, &g).is_empty(), "model {g:?}");
    }
    assert!(examined > 0);
}

#[test]
fn implication_into_empty_document_has_no_model() {
    let d = Document::parse("s <- A\ntarget node <a> s").unwrap();
    let (phi, p) = implication_formula(&d, &Document::empty()).unwrap();
    let required: BTreeSet<NodeId> = [NodeId::new("a")].into_iter().collect();
    for g in enumerate_graphs(&Signature::new(["A"], [p]), &required, 4) {
        assert!(ev(&phi, &g).is_empty());
    }
}

#[test]
fn implication_formula_detects_a_counterexample() {
    let d1 = fixture_doc("a_or_b.shacl");
    let d2 = fixture_doc("a_only.shacl");
    let (phi, p) = implication_formula(&d1, &d2).unwrap();
    let mut g = DataGraph::parse("B(a)").unwrap();
    g.add_role(p.clone(), "h", "h");
    g.add_role(p, "h", "a");
    assert_eq!(ev(&phi, &g), [NodeId::new("h")].into_iter().collect());
}

#[test]
fn formula_route_agrees_with_validation_on_fixtures() {
    let graphs = [g1(), g2()];
    let mut rng = rng(53);
    for (file, d) in all_fixture_docs() {
        for s in d.constraints.heads() {
            for g in graphs.iter().cloned().chain((0..10).map(|_| {
                let sig = Signature::of_constraints(&d.constraints);
                let concepts: Vec<&str> = sig.concepts.iter().map(|c| c.as_str()).collect();
                let roles: Vec<&str> = sig.roles.iter().map(|r| r.as_str()).collect();
                let n = rng.gen_range(1..=5);
                let mut g = if concepts.is_empty() || roles.is_empty() {
                    random_graph(&mut rng, n, &["A"], &["p"], 0.4)
                } else {
                    random_graph(&mut rng, n, &concepts, &roles, 0.4)
                };
                make_compatible(&mut g, &d);
                g
            })) {
                let report = crosscheck(&g, &d.constraints, s).unwrap();
                assert!(report.agrees(), "{file}: {s} on {g:?}: {report:?}");
            }
        }
    }
}

/// The central agreement property: formula evaluation of the translation
/// equals well-founded validation, on random graphs and normal sets.
#[test]
fn formula_route_agrees_with_validation_on_random_instances() {
    let start = Instant::now();
    let mut rng = rng(54);
    let mut cases = 0;
    let mut checked_nodes = 0;
    while cases < 1000 {
        let defs = rng.gen_range(1..=8);
        let nominals: &[&str] = if rng.gen_bool(0.5) { &["0"] } else { &[] };
        let k = SetShape { defs, concepts: &["A", "B"], roles: &["p", "r"], nominals, inverses: rng.gen_bool(0.5) };
        let c = random_normal_set(&mut rng, &k);
        let s = head(rng.gen_range(0..defs));
        let n = rng.gen_range(1..=6);
        let g = random_graph(&mut rng, n, &["A", "B"], &["p", "r"], 0.35);
        let report = crosscheck(&g, &c, &s).unwrap();
        assert!(report.agrees(), "case {cases}: {c:?}, {s} on {g:?}: {report:?}");
        let oracle = wf_oracle(&g, &c.restrict_to(&s).unwrap()).extension(&s);
        assert_eq!(report.wf_extension, oracle, "case {cases}");
        checked_nodes += g.domain().len();
        cases += 1;
    }
    assert!(checked_nodes > 0);
    eprintln!("1000 cases in {:?}", start.elapsed());
}
