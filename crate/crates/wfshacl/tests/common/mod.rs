//! Shared generators, fixture loading and independent oracles for the
//! integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use wfshacl::mu::{MuFormula, Var};
use wfshacl::wf::{Atom, ShapeAssignment};
use wfshacl::{ConstraintSet, DataGraph, Document, NodeId, Role, ShapeExpr, ShapeName};

/// The workspace fixture directory.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Path of one fixture file.
pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

/// Text of one fixture file.
pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// A parsed fixture graph.
pub fn fixture_graph(name: &str) -> DataGraph {
    DataGraph::parse(&fixture_text(name)).expect("fixture graph parses")
}

/// A parsed fixture document.
pub fn fixture_doc(name: &str) -> Document {
    Document::parse(&fixture_text(name)).expect("fixture document parses")
}

/// All `.shacl` fixtures with their file names.
pub fn all_fixture_docs() -> Vec<(String, Document)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .expect("fixture dir")
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".shacl"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), fixture_doc(&n))).collect()
}

/// The chain graph `G₁`.
pub fn g1() -> DataGraph {
    fixture_graph("g1.graph")
}

/// The two-cycle graph `G₂`.
pub fn g2() -> DataGraph {
    fixture_graph("g2.graph")
}

/// `s ← A ∨ ∃p.¬t`, `t ← ¬s ∨ ∃r.t`.
pub fn c_ex1() -> ConstraintSet {
    ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t").unwrap()
}

/// Deterministic RNG for a named suite.
pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Node names `0 … n-1`.
pub fn node(i: usize) -> NodeId {
    NodeId::new(i.to_string())
}

/// A random graph on at most `n` nodes over the given names; every node that
/// exists carries at least one assertion by construction of the domain.
pub fn random_graph(rng: &mut StdRng, n: usize, concepts: &[&str], roles: &[&str], density: f64) -> DataGraph {
    let mut g = DataGraph::new();
    for i in 0..n {
        for c in concepts {
            if rng.gen_bool(density) {
                g.add_concept(*c, node(i));
            }
        }
        for j in 0..n {
            for r in roles {
                if rng.gen_bool(density / 2.0) {
                    g.add_role(*r, node(i), node(j));
                }
            }
        }
    }
    g
}

/// A random role, possibly inverse.
pub fn random_role(rng: &mut StdRng, roles: &[&str], inverses: bool) -> Role {
    let name = *roles.choose(rng).unwrap();
    if inverses && rng.gen_bool(0.3) {
        Role::inverse(name)
    } else {
        Role::forward(name)
    }
}

/// Knobs for random constraint sets.
#[derive(Clone, Debug)]
pub struct SetShape<'a> {
    pub defs: usize,
    pub concepts: &'a [&'a str],
    pub roles: &'a [&'a str],
    pub nominals: &'a [&'a str],
    pub inverses: bool,
}

/// Head names `s0 … s{n-1}`.
pub fn head(i: usize) -> ShapeName {
    ShapeName::new(format!("s{i}"))
}

/// A random constraint set in normal form: each body is one of the seven forms.
pub fn random_normal_set(rng: &mut StdRng, k: &SetShape) -> ConstraintSet {
    let mut c = ConstraintSet::new();
    for i in 0..k.defs {
        let pick = |rng: &mut StdRng| head(rng.gen_range(0..k.defs));
        let body = loop {
            match rng.gen_range(0..7) {
                0 if !k.concepts.is_empty() => break ShapeExpr::concept(*k.concepts.choose(rng).unwrap()),
                1 if !k.nominals.is_empty() => break ShapeExpr::nominal(*k.nominals.choose(rng).unwrap()),
                2 => break ShapeExpr::NotShape(pick(rng)),
                3 if !k.roles.is_empty() => break ShapeExpr::exists(random_role(rng, k.roles, k.inverses), ShapeExpr::Shape(pick(rng))),
                4 if !k.roles.is_empty() => break ShapeExpr::forall(random_role(rng, k.roles, k.inverses), ShapeExpr::Shape(pick(rng))),
                5 => break ShapeExpr::and(ShapeExpr::Shape(pick(rng)), ShapeExpr::Shape(pick(rng))),
                6 => break ShapeExpr::or(ShapeExpr::Shape(pick(rng)), ShapeExpr::Shape(pick(rng))),
                _ => {}
            }
        };
        c.define(head(i), body).unwrap();
    }
    c
}

/// A random nested expression over heads `s0 … s{defs-1}`.
pub fn random_expr(rng: &mut StdRng, k: &SetShape, depth: usize) -> ShapeExpr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        loop {
            match rng.gen_range(0..4) {
                0 if !k.concepts.is_empty() => return ShapeExpr::concept(*k.concepts.choose(rng).unwrap()),
                1 if !k.nominals.is_empty() => return ShapeExpr::nominal(*k.nominals.choose(rng).unwrap()),
                2 => return ShapeExpr::Shape(head(rng.gen_range(0..k.defs))),
                3 => return ShapeExpr::NotShape(head(rng.gen_range(0..k.defs))),
                _ => {}
            }
        }
    }
    match rng.gen_range(0..4) {
        0 => ShapeExpr::and(random_expr(rng, k, depth - 1), random_expr(rng, k, depth - 1)),
        1 => ShapeExpr::or(random_expr(rng, k, depth - 1), random_expr(rng, k, depth - 1)),
        2 if !k.roles.is_empty() => ShapeExpr::exists(random_role(rng, k.roles, k.inverses), random_expr(rng, k, depth - 1)),
        3 if !k.roles.is_empty() => ShapeExpr::forall(random_role(rng, k.roles, k.inverses), random_expr(rng, k, depth - 1)),
        _ => ShapeExpr::and(random_expr(rng, k, depth - 1), random_expr(rng, k, depth - 1)),
    }
}

/// A random constraint set with nested bodies (not in normal form).
pub fn random_nested_set(rng: &mut StdRng, k: &SetShape, depth: usize) -> ConstraintSet {
    let mut c = ConstraintSet::new();
    for i in 0..k.defs {
        c.define(head(i), random_expr(rng, k, depth)).unwrap();
    }
    c
}

/// A random stratified set: each head gets a layer; positive references go to
/// heads at or below it, negative ones strictly below.
pub fn random_stratified_set(rng: &mut StdRng, k: &SetShape, depth: usize) -> ConstraintSet {
    let layers: Vec<usize> = (0..k.defs).map(|_| rng.gen_range(0..3)).collect();
    let mut c = ConstraintSet::new();
    for i in 0..k.defs {
        let at_or_below: Vec<usize> = (0..k.defs).filter(|&j| layers[j] <= layers[i]).collect();
        let strictly_below: Vec<usize> = (0..k.defs).filter(|&j| layers[j] < layers[i]).collect();
        let body = stratified_expr(rng, k, depth, &at_or_below, &strictly_below);
        c.define(head(i), body).unwrap();
    }
    c
}

fn stratified_expr(rng: &mut StdRng, k: &SetShape, depth: usize, pos: &[usize], neg: &[usize]) -> ShapeExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        loop {
            match rng.gen_range(0..4) {
                0 if !k.concepts.is_empty() => return ShapeExpr::concept(*k.concepts.choose(rng).unwrap()),
                1 if !k.nominals.is_empty() => return ShapeExpr::nominal(*k.nominals.choose(rng).unwrap()),
                2 => return ShapeExpr::Shape(head(*pos.choose(rng).unwrap())),
                3 if !neg.is_empty() => return ShapeExpr::NotShape(head(*neg.choose(rng).unwrap())),
                _ => {}
            }
        }
    }
    let sub = |rng: &mut StdRng| stratified_expr(rng, k, depth - 1, pos, neg);
    match rng.gen_range(0..4) {
        0 => ShapeExpr::and(sub(rng), sub(rng)),
        1 => ShapeExpr::or(sub(rng), sub(rng)),
        2 if !k.roles.is_empty() => {
            let r = random_role(rng, k.roles, k.inverses);
            ShapeExpr::exists(r, sub(rng))
        }
        _ if !k.roles.is_empty() => {
            let r = random_role(rng, k.roles, k.inverses);
            ShapeExpr::forall(r, sub(rng))
        }
        _ => ShapeExpr::or(sub(rng), sub(rng)),
    }
}

/// Two-valued evaluation of a body: positive references read `pos`, negated
/// references are true where the atom is absent from `context`.
pub fn eval_two_valued(
    phi: &ShapeExpr,
    g: &DataGraph,
    dom: &BTreeSet<NodeId>,
    pos: &BTreeSet<Atom>,
    context: &BTreeSet<Atom>,
) -> BTreeSet<NodeId> {
    match phi {
        ShapeExpr::Shape(s) => dom.iter().filter(|a| pos.contains(&(s.clone(), (*a).clone()))).cloned().collect(),
        ShapeExpr::NotShape(s) => dom.iter().filter(|a| !context.contains(&(s.clone(), (*a).clone()))).cloned().collect(),
        ShapeExpr::Concept(c) => g.concept_extension(c).intersection(dom).cloned().collect(),
        ShapeExpr::Nominal(a) => dom.iter().filter(|b| *b == a).cloned().collect(),
        ShapeExpr::And(l, r) => {
            let l = eval_two_valued(l, g, dom, pos, context);
            let r = eval_two_valued(r, g, dom, pos, context);
            l.intersection(&r).cloned().collect()
        }
        ShapeExpr::Or(l, r) => {
            let mut l = eval_two_valued(l, g, dom, pos, context);
            l.extend(eval_two_valued(r, g, dom, pos, context));
            l
        }
        ShapeExpr::Exists(role, b) => {
            let inner = eval_two_valued(b, g, dom, pos, context);
            let edges = g.role_extension(role);
            dom.iter().filter(|a| edges.iter().any(|(x, y)| x == *a && inner.contains(y))).cloned().collect()
        }
        ShapeExpr::Forall(role, b) => {
            let inner = eval_two_valued(b, g, dom, pos, context);
            let edges = g.role_extension(role);
            dom.iter().filter(|a| edges.iter().all(|(x, y)| x != *a || inner.contains(y))).cloned().collect()
        }
    }
}

/// The alternating-fixpoint operator: the least set closed under the bodies
/// when negated references are judged against `context`.
pub fn gamma(g: &DataGraph, c: &ConstraintSet, context: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let dom = g.domain();
    let mut cur: BTreeSet<Atom> = BTreeSet::new();
    loop {
        let mut next = BTreeSet::new();
        for (s, body) in c.iter() {
            for a in eval_two_valued(body, g, &dom, &cur, context) {
                next.insert((s.clone(), a));
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// The well-founded model by the alternating fixpoint: the true atoms are the
/// least fixed point of `Γ∘Γ`; the false atoms are those outside `Γ(true)`.
pub fn wf_oracle(g: &DataGraph, c: &ConstraintSet) -> ShapeAssignment {
    let mut truth: BTreeSet<Atom> = BTreeSet::new();
    loop {
        let next = gamma(g, c, &gamma(g, c, &truth));
        if next == truth {
            break;
        }
        truth = next;
    }
    let possible = gamma(g, c, &truth);
    let dom = g.domain();
    let mut negative = BTreeSet::new();
    for s in c.heads() {
        for a in &dom {
            let atom = (s.clone(), a.clone());
            if !possible.contains(&atom) {
                negative.insert(atom);
            }
        }
    }
    ShapeAssignment::from_parts(truth, negative)
}

/// All total assignments over the defined shapes and the domain.
pub fn all_total_assignments(g: &DataGraph, c: &ConstraintSet) -> Vec<ShapeAssignment> {
    let atoms: Vec<Atom> = c.heads().flat_map(|s| g.domain().into_iter().map(move |a| (s.clone(), a))).collect();
    assert!(atoms.len() <= 16, "brute force limited to 16 atoms");
    (0u32..(1 << atoms.len()))
        .map(|mask| {
            let (pos, neg): (Vec<_>, Vec<_>) = atoms.iter().enumerate().partition(|(i, _)| mask >> i & 1 == 1);
            ShapeAssignment::from_parts(pos.into_iter().map(|(_, a)| a.clone()), neg.into_iter().map(|(_, a)| a.clone()))
        })
        .collect()
}

/// A random closed formula in negation normal form.
pub fn random_closed_formula(rng: &mut StdRng, concepts: &[&str], roles: &[&str], nominals: &[&str], depth: usize) -> MuFormula {
    let mut counter = 0;
    random_formula(rng, concepts, roles, nominals, depth, &mut Vec::new(), &mut counter)
}

fn random_formula(
    rng: &mut StdRng,
    concepts: &[&str],
    roles: &[&str],
    nominals: &[&str],
    depth: usize,
    bound: &mut Vec<Var>,
    counter: &mut usize,
) -> MuFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        loop {
            match rng.gen_range(0..5) {
                0 => return MuFormula::concept(*concepts.choose(rng).unwrap()),
                1 => return MuFormula::not_concept(*concepts.choose(rng).unwrap()),
                2 if !nominals.is_empty() => return MuFormula::nominal(*nominals.choose(rng).unwrap()),
                3 if !nominals.is_empty() => return MuFormula::not_nominal(*nominals.choose(rng).unwrap()),
                4 if !bound.is_empty() => return MuFormula::Var(bound.choose(rng).unwrap().clone()),
                _ => {}
            }
        }
    }
    match rng.gen_range(0..6) {
        0 => MuFormula::and(
            random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter),
            random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter),
        ),
        1 => MuFormula::or(
            random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter),
            random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter),
        ),
        2 => {
            let r = random_role(rng, roles, true);
            MuFormula::boxed(r, random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter))
        }
        3 => {
            let r = random_role(rng, roles, true);
            MuFormula::diamond(r, random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter))
        }
        k => {
            *counter += 1;
            let x = Var::new(format!("X{counter}"));
            bound.push(x.clone());
            let body = random_formula(rng, concepts, roles, nominals, depth - 1, bound, counter);
            bound.pop();
            if k == 4 {
                MuFormula::mu(x, body)
            } else {
                MuFormula::nu(x, body)
            }
        }
    }
}

/// A random document over a random normal set with up to `targets` targets
/// of all three kinds; node targets use the individuals `0` and `1`.
pub fn random_document(rng: &mut StdRng, k: &SetShape, targets: usize) -> Document {
    let c = random_normal_set(rng, k);
    let mut ts = Vec::new();
    for _ in 0..rng.gen_range(0..=targets) {
        let s = head(rng.gen_range(0..k.defs));
        let t = match rng.gen_range(0..3) {
            0 => wfshacl::Target::node(node(rng.gen_range(0..2)), s),
            1 if !k.concepts.is_empty() => wfshacl::Target::class(*k.concepts.choose(rng).unwrap(), s),
            _ if !k.roles.is_empty() => wfshacl::Target::role(random_role(rng, k.roles, k.inverses), s),
            _ => wfshacl::Target::node(node(0), s),
        };
        ts.push(t);
    }
    Document::new(c, ts).expect("generated documents are well formed")
}

/// Ensures every individual of `d` occurs in `g` (adds a padding concept).
pub fn make_compatible(g: &mut DataGraph, d: &Document) {
    let dom = g.domain();
    for a in d.individuals() {
        if !dom.contains(&a) {
            g.add_concept("Pad", a);
        }
    }
}
