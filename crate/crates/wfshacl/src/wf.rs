//! Well-founded semantics: three-valued evaluation of shape expressions, the
//! `T`, greatest-unfounded-set and `W` operators, the least fixed point of `W`
//! and target validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    check_compatible, ConstraintSet, DataGraph, Document, IndexedGraph, ModelError, NodeId, ShapeExpr, ShapeName, TargetSubject,
};

/// A shape atom `s(a)`.
pub type Atom = (ShapeName, NodeId);

/// Errors raised by the well-founded engine.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WfError {
    /// An operator produced both `s(a)` and `¬s(a)`; this indicates an engine bug.
    #[error("inconsistent assignment: both {0}({1}) and its negation were derived")]
    Inconsistent(ShapeName, NodeId),
    /// The input is not well formed or not compatible.
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Selects the lower bound ⌊·⌋ (certainly validated) or the upper bound ⌈·⌉
/// (possibly validated).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    /// ⌊·⌋
    Lower,
    /// ⌈·⌉
    Upper,
}

/// A three-valued shape assignment: sets of positive and negated atoms.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeAssignment {
    /// Atoms `s(a)` assigned true.
    pub positive: BTreeSet<Atom>,
    /// Atoms `s(a)` whose negation `¬s(a)` is assigned.
    pub negative: BTreeSet<Atom>,
}

impl ShapeAssignment {
    /// The empty assignment.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an assignment from positive and negated atoms.
    pub fn from_parts(positive: impl IntoIterator<Item = Atom>, negative: impl IntoIterator<Item = Atom>) -> Self {
        ShapeAssignment { positive: positive.into_iter().collect(), negative: negative.into_iter().collect() }
    }

    /// Parses a literal list such as `s(6) ¬t(6) !t(5)` (commas and braces are ignored).
    pub fn parse(text: &str) -> Result<Self, crate::model::ParseError> {
        let mut out = ShapeAssignment::new();
        let cleaned: String = text.chars().map(|c| if matches!(c, '{' | '}' | ',') { ' ' } else { c }).collect();
        let mut col = 1;
        for tok in cleaned.split_whitespace() {
            let (negated, rest) = match tok.strip_prefix('¬').or_else(|| tok.strip_prefix('!')) {
                Some(r) => (true, r),
                None => (false, tok),
            };
            let open = rest.find('(');
            let close = rest.strip_suffix(')');
            match (open, close) {
                (Some(i), Some(inner)) if i > 0 && inner.len() > i + 1 => {
                    let atom = (ShapeName::new(&rest[..i]), NodeId::new(&inner[i + 1..]));
                    if negated {
                        out.negative.insert(atom);
                    } else {
                        out.positive.insert(atom);
                    }
                }
                _ => return Err(crate::model::ParseError::new(1, col, format!("malformed literal `{tok}`"))),
            }
            col += tok.len() + 1;
        }
        Ok(out)
    }

    /// Whether `s(a)` is assigned true.
    pub fn holds(&self, s: &ShapeName, a: &NodeId) -> bool {
        self.positive.contains(&(s.clone(), a.clone()))
    }

    /// Whether `¬s(a)` is assigned.
    pub fn refutes(&self, s: &ShapeName, a: &NodeId) -> bool {
        self.negative.contains(&(s.clone(), a.clone()))
    }

    /// No atom is both true and false.
    pub fn is_consistent(&self) -> bool {
        self.positive.is_disjoint(&self.negative)
    }

    /// Every `(s, a)` over the given shapes and nodes is assigned one way or the other.
    pub fn is_total<'a>(&self, shapes: impl IntoIterator<Item = &'a ShapeName>, nodes: &BTreeSet<NodeId>) -> bool {
        shapes.into_iter().all(|s| nodes.iter().all(|a| self.holds(s, a) || self.refutes(s, a)))
    }

    /// Componentwise inclusion.
    pub fn is_subset(&self, other: &ShapeAssignment) -> bool {
        self.positive.is_subset(&other.positive) && self.negative.is_subset(&other.negative)
    }

    /// Componentwise union.
    pub fn union(&self, other: &ShapeAssignment) -> ShapeAssignment {
        ShapeAssignment {
            positive: self.positive.union(&other.positive).cloned().collect(),
            negative: self.negative.union(&other.negative).cloned().collect(),
        }
    }

    /// Number of literals.
    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    /// Whether no literal is assigned.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `{a | s(a) ∈ S}`.
    pub fn extension(&self, s: &ShapeName) -> BTreeSet<NodeId> {
        self.positive.iter().filter(|(x, _)| x == s).map(|(_, a)| a.clone()).collect()
    }

    /// The literals rendered as `s(a)` / `¬s(a)`, sorted as strings.
    pub fn literals(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.positive.iter().map(|(s, a)| format!("{s}({a})")).chain(self.negative.iter().map(|(s, a)| format!("¬{s}({a})"))).collect();
        out.sort();
        out
    }
}

impl fmt::Display for ShapeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.literals().join(", "))
    }
}

impl fmt::Debug for ShapeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The iterates `W¹(∅), W²(∅), …` up to the fixed point (each recorded once).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace(pub Vec<ShapeAssignment>);

impl Trace {
    /// The trace lines `i: lit lit …` (literals sorted as strings, `∅` when empty).
    pub fn lines(&self) -> Vec<String> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, s)| if s.is_empty() { format!("{}: ∅", i + 1) } else { format!("{}: {}", i + 1, s.literals().join(" ")) })
            .collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// The well-founded model together with the iteration that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WfModel {
    /// The least fixed point of `W`.
    pub model: ShapeAssignment,
    /// The distinct iterates, ending with the model.
    pub trace: Trace,
}

/// A dense assignment: one bit set per defined shape for each sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense {
    pub(crate) pos: Vec<FixedBitSet>,
    pub(crate) neg: Vec<FixedBitSet>,
}

impl Dense {
    fn subset(&self, other: &Dense) -> bool {
        self.pos.iter().zip(&other.pos).all(|(a, b)| a.is_subset(b)) && self.neg.iter().zip(&other.neg).all(|(a, b)| a.is_subset(b))
    }
}

/// Evaluation machinery for one graph and one constraint set, on dense bit sets.
pub(crate) struct Engine<'a> {
    pub(crate) ig: IndexedGraph,
    pub(crate) shapes: Vec<ShapeName>,
    index: BTreeMap<ShapeName, usize>,
    bodies: Vec<&'a ShapeExpr>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(g: &DataGraph, c: &'a ConstraintSet) -> Self {
        Self::with_index(g.index(), c)
    }

    pub(crate) fn with_index(ig: IndexedGraph, c: &'a ConstraintSet) -> Self {
        let shapes: Vec<ShapeName> = c.heads().cloned().collect();
        let index = shapes.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let bodies = c.iter().map(|(_, b)| b).collect();
        Engine { ig, shapes, index, bodies }
    }

    pub(crate) fn empty(&self) -> Dense {
        let e = self.ig.empty_set();
        Dense { pos: vec![e.clone(); self.shapes.len()], neg: vec![e; self.shapes.len()] }
    }

    pub(crate) fn shape_index(&self, s: &ShapeName) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub(crate) fn to_dense(&self, s: &ShapeAssignment) -> Dense {
        let mut d = self.empty();
        for (x, a) in &s.positive {
            if let (Some(i), Some(j)) = (self.shape_index(x), self.ig.index_of(a)) {
                d.pos[i].insert(j);
            }
        }
        for (x, a) in &s.negative {
            if let (Some(i), Some(j)) = (self.shape_index(x), self.ig.index_of(a)) {
                d.neg[i].insert(j);
            }
        }
        d
    }

    pub(crate) fn decode(&self, d: &Dense) -> ShapeAssignment {
        let mut out = ShapeAssignment::new();
        for (i, s) in self.shapes.iter().enumerate() {
            for j in d.pos[i].ones() {
                out.positive.insert((s.clone(), self.ig.node(j).clone()));
            }
            for j in d.neg[i].ones() {
                out.negative.insert((s.clone(), self.ig.node(j).clone()));
            }
        }
        out
    }

    /// Evaluates `φ` under the assignment `(pos, neg)`; atoms outside the
    /// defined shapes are unassigned.
    pub(crate) fn eval(&self, phi: &ShapeExpr, pos: &[FixedBitSet], neg: &[FixedBitSet], pol: Polarity) -> FixedBitSet {
        let ig = &self.ig;
        match phi {
            ShapeExpr::Shape(s) => match (self.shape_index(s), pol) {
                (Some(i), Polarity::Lower) => pos[i].clone(),
                (Some(i), Polarity::Upper) => complement(ig, &neg[i]),
                (None, Polarity::Lower) => ig.empty_set(),
                (None, Polarity::Upper) => ig.full_set(),
            },
            ShapeExpr::NotShape(s) => match (self.shape_index(s), pol) {
                (Some(i), Polarity::Lower) => neg[i].clone(),
                (Some(i), Polarity::Upper) => complement(ig, &pos[i]),
                (None, Polarity::Lower) => ig.empty_set(),
                (None, Polarity::Upper) => ig.full_set(),
            },
            ShapeExpr::Nominal(a) => ig.from_nodes(std::iter::once(a)),
            ShapeExpr::Concept(c) => ig.concept(c),
            ShapeExpr::And(l, r) => {
                let mut x = self.eval(l, pos, neg, pol);
                x.intersect_with(&self.eval(r, pos, neg, pol));
                x
            }
            ShapeExpr::Or(l, r) => {
                let mut x = self.eval(l, pos, neg, pol);
                x.union_with(&self.eval(r, pos, neg, pol));
                x
            }
            ShapeExpr::Exists(role, b) => ig.exists(role, &self.eval(b, pos, neg, pol)),
            ShapeExpr::Forall(role, b) => ig.forall(role, &self.eval(b, pos, neg, pol)),
        }
    }

    pub(crate) fn t_op(&self, s: &Dense) -> Vec<FixedBitSet> {
        self.bodies.iter().map(|b| self.eval(b, &s.pos, &s.neg, Polarity::Lower)).collect()
    }

    /// Greatest unfounded set by downward iteration from all atoms.
    pub(crate) fn u_op(&self, s: &Dense) -> Vec<FixedBitSet> {
        let mut u: Vec<FixedBitSet> = vec![self.ig.full_set(); self.shapes.len()];
        loop {
            let neg: Vec<FixedBitSet> = s
                .neg
                .iter()
                .zip(&u)
                .map(|(a, b)| {
                    let mut x = a.clone();
                    x.union_with(b);
                    x
                })
                .collect();
            let next: Vec<FixedBitSet> = self
                .bodies
                .iter()
                .zip(&u)
                .map(|(b, ui)| {
                    let mut keep = ui.clone();
                    keep.difference_with(&self.eval(b, &s.pos, &neg, Polarity::Upper));
                    keep
                })
                .collect();
            if next == u {
                return u;
            }
            u = next;
        }
    }

    pub(crate) fn w_op(&self, s: &Dense) -> Result<Dense, WfError> {
        let out = Dense { pos: self.t_op(s), neg: self.u_op(s) };
        for (i, (p, n)) in out.pos.iter().zip(&out.neg).enumerate() {
            if let Some(j) = p.intersection(n).next() {
                return Err(WfError::Inconsistent(self.shapes[i].clone(), self.ig.node(j).clone()));
            }
        }
        Ok(out)
    }

    pub(crate) fn lfp(&self) -> Result<(Dense, Vec<Dense>), WfError> {
        let mut cur = self.empty();
        let mut trace = Vec::new();
        loop {
            let next = self.w_op(&cur)?;
            debug_assert!(cur.subset(&next), "W iteration must be increasing");
            if trace.last() == Some(&next) {
                return Ok((next, trace));
            }
            trace.push(next.clone());
            cur = next;
        }
    }
}

fn complement(ig: &IndexedGraph, set: &FixedBitSet) -> FixedBitSet {
    let mut x = ig.full_set();
    x.difference_with(set);
    x
}

/// ⌊φ⌋ or ⌈φ⌉ of `g` under `s`. Shapes are looked up by name in `s` only.
pub fn eval_expr(phi: &ShapeExpr, g: &DataGraph, s: &ShapeAssignment, pol: Polarity) -> BTreeSet<NodeId> {
    let mut c = ConstraintSet::new();
    for name in phi.shape_refs().into_iter().chain(s.positive.iter().chain(&s.negative).map(|(x, _)| x.clone())) {
        if !c.defines(&name) {
            c.define(name, ShapeExpr::concept("Top")).expect("fresh head");
        }
    }
    let e = Engine::new(g, &c);
    let d = e.to_dense(s);
    e.ig.to_nodes(&e.eval(phi, &d.pos, &d.neg, pol))
}

/// `T(S) = {s(a) | s ← φ ∈ C, a ∈ ⌊φ⌋}`.
pub fn t_operator(g: &DataGraph, c: &ConstraintSet, s: &ShapeAssignment) -> BTreeSet<Atom> {
    let e = Engine::new(g, c);
    let t = e.t_op(&e.to_dense(s));
    let d = Dense { pos: t, neg: e.empty().neg };
    e.decode(&d).positive
}

/// The greatest unfounded set w.r.t. `s`, over defined shapes × Δ.
pub fn greatest_unfounded(g: &DataGraph, c: &ConstraintSet, s: &ShapeAssignment) -> BTreeSet<Atom> {
    let e = Engine::new(g, c);
    let u = e.u_op(&e.to_dense(s));
    let d = Dense { pos: e.empty().pos, neg: u };
    e.decode(&d).negative
}

/// The definitional check: `a ∉ ⌈C(s)⌉` under `S ∪ ¬.U` for every `s(a) ∈ U`.
pub fn is_unfounded(g: &DataGraph, c: &ConstraintSet, s: &ShapeAssignment, u: &BTreeSet<Atom>) -> bool {
    let assumed = s.union(&ShapeAssignment { positive: BTreeSet::new(), negative: u.clone() });
    u.iter().all(|(x, a)| match c.get(x) {
        Some(body) => !eval_expr(body, g, &assumed, Polarity::Upper).contains(a),
        None => false,
    })
}

/// `W(S) = T(S) ∪ ¬.U(S)`; fails if the result is inconsistent.
pub fn w_operator(g: &DataGraph, c: &ConstraintSet, s: &ShapeAssignment) -> Result<ShapeAssignment, WfError> {
    let e = Engine::new(g, c);
    Ok(e.decode(&e.w_op(&e.to_dense(s))?))
}

/// The least fixed point of `W`, iterated from `∅`, with its trace.
pub fn well_founded_model(g: &DataGraph, c: &ConstraintSet) -> Result<WfModel, WfError> {
    c.check_defined()?;
    let e = Engine::new(g, c);
    let (model, trace) = e.lfp()?;
    Ok(WfModel { model: e.decode(&model), trace: Trace(trace.iter().map(|d| e.decode(d)).collect()) })
}

/// Whether `model` satisfies every target of `d` on `g`.
pub fn validates(g: &DataGraph, d: &Document, model: &ShapeAssignment) -> Result<bool, ModelError> {
    ensure_compatible(g, d)?;
    Ok(d.targets.iter().all(|t| match &t.subject {
        TargetSubject::Node(a) => model.holds(&t.shape, a),
        _ => t.selected_nodes(g).iter().all(|a| model.holds(&t.shape, a)),
    }))
}

/// Validates `g` against `d` under the well-founded semantics.
pub fn validate_document(g: &DataGraph, d: &Document) -> Result<bool, WfError> {
    ensure_compatible(g, d)?;
    let m = well_founded_model(g, &d.constraints)?;
    Ok(validates(g, d, &m.model)?)
}

/// Surfaces the first individual of `d` missing from `g` as `IncompatibleGraph`.
pub fn ensure_compatible(g: &DataGraph, d: &Document) -> Result<(), ModelError> {
    if check_compatible(g, d) {
        return Ok(());
    }
    let dom = g.domain();
    let missing = d.individuals().into_iter().find(|a| !dom.contains(a)).expect("incompatible implies a missing individual");
    Err(ModelError::IncompatibleGraph(missing))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> DataGraph {
        let mut g = DataGraph::new();
        for i in 0..6 {
            g.add_role("p", i.to_string(), (i + 1).to_string());
            g.add_role("r", (i + 1).to_string(), (i + 1).to_string());
        }
        g.add_concept("A", "6");
        g
    }

    fn c_ex1() -> ConstraintSet {
        ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t").unwrap()
    }

    #[test]
    fn example_one_trace_prefix() {
        let m = well_founded_model(&g1(), &c_ex1()).unwrap();
        let lines = m.trace.lines();
        assert_eq!(lines[0], "1: s(6)");
        assert_eq!(lines[1], "2: s(6) ¬t(6)");
        assert_eq!(lines[2], "3: s(5) s(6) ¬t(6)");
        assert_eq!(lines[3], "4: s(5) s(6) ¬t(5) ¬t(6)");
        assert!(m.model.holds(&"s".into(), &"0".into()));
    }

    #[test]
    fn lower_evaluation_of_example_body() {
        let body = ShapeExpr::parse("A | some p . !t").unwrap();
        let got = eval_expr(&body, &g1(), &ShapeAssignment::new(), Polarity::Lower);
        assert_eq!(got, BTreeSet::from([NodeId::from("6")]));
        let neg_t = ShapeExpr::parse("some p . !t").unwrap();
        let s = ShapeAssignment::parse("¬t(6)").unwrap();
        assert_eq!(eval_expr(&neg_t, &g1(), &s, Polarity::Lower), BTreeSet::from([NodeId::from("5")]));
        let upper = eval_expr(&ShapeExpr::not_shape("t"), &g1(), &ShapeAssignment::new(), Polarity::Upper);
        assert_eq!(upper.len(), 7);
    }

    #[test]
    fn nominal_shape_is_unfounded_elsewhere() {
        let mut g = DataGraph::new();
        g.add_concept("A", "b");
        g.add_concept("B", "a");
        let c = ConstraintSet::parse("s <- <a>").unwrap();
        let u = greatest_unfounded(&g, &c, &ShapeAssignment::new());
        assert_eq!(u, BTreeSet::from([("s".into(), "b".into())]));
    }

    #[test]
    fn assignment_literals_parse_and_print() {
        let s = ShapeAssignment::parse("{s(0), ¬t(1), !u(2)}").unwrap();
        assert_eq!(s.literals(), ["s(0)", "¬t(1)", "¬u(2)"]);
        assert!(ShapeAssignment::parse("s(").is_err());
    }
}
