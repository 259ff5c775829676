//! Bounded decision procedures: shape and document satisfiability and document
//! implication by counterexample search, with every witness replayed through
//! both the well-founded engine and the μ-calculus evaluator.

pub mod aig;
mod enumerate;
mod symbolic;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConceptName, ConstraintSet, DataGraph, Document, ModelError, NodeId, Role, RoleName, ShapeName};
use crate::mu::{eval, MuError, MuFormula, Valuation};
use crate::supported::{enumerate_supported_models_with_budget, SupportedError, DEFAULT_BIT_BUDGET};
use crate::translate::{fresh_role, TranslateError, Translator};
use crate::wf::{validate_document, validates, well_founded_model, WfError};

pub use enumerate::{enumerate_graphs, GraphStream, Padding, Signature, MAX_SLOTS};
pub use symbolic::SymbolicGraph;

/// Errors of the bounded searches.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AnalysisError {
    /// Malformed input.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// Translation failed (usually the node budget).
    #[error(transparent)]
    Translate(#[from] TranslateError),
    /// The well-founded engine failed.
    #[error(transparent)]
    Wf(#[from] WfError),
    /// Formula evaluation failed.
    #[error(transparent)]
    Mu(#[from] MuError),
    /// The supported-model enumeration exceeded its budget.
    #[error(transparent)]
    Supported(#[from] SupportedError),
    /// A size level has too many assertion slots to enumerate.
    #[error("{slots} assertion slots at {nodes} nodes exceed the enumeration limit")]
    SearchSpace {
        /// Node count of the level.
        nodes: usize,
        /// Assertion slots at that size.
        slots: usize,
    },
    /// A witness failed to replay; indicates an internal inconsistency.
    #[error("witness failed to replay through the {0} route")]
    ReplayFailed(&'static str),
}

/// Which semantics the searched property refers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// The well-founded semantics.
    #[default]
    Wf,
    /// The supported-model semantics with brave validation (enumeration only).
    Supported,
}

/// How candidate graphs are explored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One SAT query per domain size over the translated formula.
    #[default]
    Symbolic,
    /// Explicit graph enumeration checked with the validation engine.
    Enumerate,
}

/// Wall-clock and count limits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Milliseconds before the search stops.
    pub max_millis: Option<u64>,
    /// Candidate graphs (or symbolic queries) before the search stops.
    pub max_graphs: Option<u64>,
}

/// Search configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Largest domain size explored.
    pub max_nodes: usize,
    /// Search limits.
    pub budget: Budget,
    /// Exploration strategy.
    pub strategy: Strategy,
    /// Semantics of validation.
    pub semantics: Semantics,
    /// Greedily drop assertions from a witness while it stays a witness.
    pub minimize: bool,
}

impl SearchOptions {
    /// Defaults for a bound: symbolic, well-founded, minimised, unlimited budget.
    pub fn new(max_nodes: usize) -> Self {
        SearchOptions { max_nodes, budget: Budget::default(), strategy: Strategy::Symbolic, semantics: Semantics::Wf, minimize: true }
    }

    /// The same options with another strategy.
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// The same options with another semantics.
    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    /// The same options with a budget.
    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

/// The verdict of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A graph with the searched property.
    Witness(DataGraph),
    /// No such graph with at most this many nodes.
    NoWitnessUpTo(usize),
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// The verdict; a `NoWitnessUpTo` bound is the largest size fully explored.
    pub verdict: Verdict,
    /// Candidate graphs checked (symbolic searches count one per size query).
    pub graphs_examined: u64,
    /// The requested bound.
    pub bound: usize,
    /// Wall-clock time spent.
    pub elapsed_ms: u64,
    /// Whether a budget stopped the search before the bound was reached.
    pub budget_exhausted: bool,
}

impl SearchOutcome {
    /// The witness, if any.
    pub fn witness(&self) -> Option<&DataGraph> {
        match &self.verdict {
            Verdict::Witness(g) => Some(g),
            Verdict::NoWitnessUpTo(_) => None,
        }
    }

    /// Whether a witness was found.
    pub fn found(&self) -> bool {
        self.witness().is_some()
    }
}

/// The graph property searched for.
enum Problem {
    /// Some node validates `s` under `c` (already restricted to `s`).
    Shape { c: ConstraintSet, s: ShapeName, formula: MuFormula },
    /// The graph validates `d1` and not `d2` (`d2 = None`: validates `d1`).
    Docs { d1: Document, d2: Option<Document>, theta1: MuFormula, theta2: Option<MuFormula> },
}

impl Problem {
    fn shape(c: &ConstraintSet, s: &ShapeName) -> Result<Self, AnalysisError> {
        let cs = c.restrict_to(s)?;
        let formula = Translator::new().translate_shape(&cs, s)?;
        Ok(Problem::Shape { c: cs, s: s.clone(), formula })
    }

    fn docs(d1: &Document, d2: Option<&Document>) -> Result<Self, AnalysisError> {
        d1.check_well_formed()?;
        let mut tr = Translator::new();
        let theta1 = tr.theta(d1)?;
        let theta2 = match d2 {
            Some(d) => {
                d.check_well_formed()?;
                Some(tr.theta(d)?)
            }
            None => None,
        };
        Ok(Problem::Docs { d1: d1.clone(), d2: d2.cloned(), theta1, theta2 })
    }

    fn signature(&self) -> Signature {
        match self {
            Problem::Shape { c, .. } => Signature::of_constraints(c),
            Problem::Docs { d1, d2, .. } => {
                let s = Signature::of_document(d1);
                d2.as_ref().map_or(s.clone(), |d| s.union(&Signature::of_document(d)))
            }
        }
    }

    fn required(&self) -> BTreeSet<NodeId> {
        match self {
            Problem::Shape { c, .. } => c.nominals(),
            Problem::Docs { d1, d2, .. } => {
                let mut out = d1.individuals();
                if let Some(d) = d2 {
                    out.extend(d.individuals());
                }
                out
            }
        }
    }

    /// Direct check through the validation engines.
    fn check(&self, g: &DataGraph, semantics: Semantics) -> Result<bool, AnalysisError> {
        let dom = g.domain();
        if !self.required().is_subset(&dom) {
            return Ok(false);
        }
        match (self, semantics) {
            (Problem::Shape { c, s, .. }, Semantics::Wf) => {
                let m = well_founded_model(g, c)?;
                Ok(!m.model.extension(s).is_empty())
            }
            (Problem::Shape { c, s, .. }, Semantics::Supported) => {
                let bits = c.len() * dom.len();
                let models = enumerate_supported_models_with_budget(g, c, bits.max(DEFAULT_BIT_BUDGET))?;
                Ok(models.iter().any(|m| !m.extension(s).is_empty()))
            }
            (Problem::Docs { d1, d2, .. }, Semantics::Wf) => {
                let first = validate_document(g, d1)?;
                Ok(first && !d2.as_ref().map_or(Ok(false), |d| validate_document(g, d))?)
            }
            (Problem::Docs { d1, d2, .. }, Semantics::Supported) => {
                let first = validates_supported(g, d1)?;
                Ok(first && !d2.as_ref().map_or(Ok(false), |d| validates_supported(g, d))?)
            }
        }
    }

    /// Check through the μ-calculus evaluator (well-founded semantics).
    fn check_mu(&self, g: &DataGraph) -> Result<bool, AnalysisError> {
        let v = Valuation::new();
        match self {
            Problem::Shape { formula, .. } => Ok(!eval(formula, g, &v)?.is_empty()),
            Problem::Docs { theta1, theta2, .. } => {
                let dom = g.domain();
                let first = eval(theta1, g, &v)? == dom;
                let second = match theta2 {
                    Some(t) => eval(t, g, &v)? == dom,
                    None => false,
                };
                Ok(first && !second)
            }
        }
    }

    fn goal(&self, sg: &mut SymbolicGraph) -> aig::Edge {
        match self {
            Problem::Shape { formula, .. } => {
                let v = sg.eval(formula);
                sg.aig.or_all(v)
            }
            Problem::Docs { theta1, theta2, .. } => {
                let v1 = sg.eval(theta1);
                let first = sg.aig.and_all(v1);
                let second = match theta2 {
                    Some(t) => {
                        let v2 = sg.eval(t);
                        sg.aig.and_all(v2)
                    }
                    None => aig::Edge::FALSE,
                };
                sg.aig.and(first, !second)
            }
        }
    }
}

/// Brave validation under the supported semantics: some supported model
/// satisfies every target.
pub fn validates_supported(g: &DataGraph, d: &Document) -> Result<bool, AnalysisError> {
    crate::wf::ensure_compatible(g, d)?;
    let bits = d.constraints.len() * g.domain().len();
    let models = enumerate_supported_models_with_budget(g, &d.constraints, bits.max(DEFAULT_BIT_BUDGET))?;
    for m in &models {
        if validates(g, d, m)? {
            return Ok(true);
        }
    }
    Ok(false)
}

struct Clock {
    start: Instant,
    budget: Budget,
    examined: u64,
}

impl Clock {
    fn new(budget: Budget) -> Self {
        Clock { start: Instant::now(), budget, examined: 0 }
    }

    fn exhausted(&self) -> bool {
        self.budget.max_graphs.is_some_and(|m| self.examined >= m)
            || self.budget.max_millis.is_some_and(|m| self.start.elapsed() >= Duration::from_millis(m))
    }

    fn elapsed_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

fn search(problem: &Problem, opts: &SearchOptions) -> Result<SearchOutcome, AnalysisError> {
    let sig = problem.signature();
    let required = problem.required();
    let aux = sig.fresh_concept();
    let mut clock = Clock::new(opts.budget);
    let strategy = if opts.semantics == Semantics::Supported { Strategy::Enumerate } else { opts.strategy };
    let first = required.len();
    let mut explored: Option<usize> = None;
    let mut found = None;
    let mut exhausted = false;
    match strategy {
        Strategy::Symbolic => {
            for n in first..=opts.max_nodes {
                if clock.exhausted() {
                    exhausted = true;
                    break;
                }
                let mut nodes: Vec<NodeId> = required.iter().cloned().collect();
                let mut k = 0usize;
                while nodes.len() < n {
                    let cand = NodeId::new(k.to_string());
                    if !required.contains(&cand) {
                        nodes.push(cand);
                    }
                    k += 1;
                }
                let mut sg = SymbolicGraph::new(nodes, &sig.concepts, &sig.roles);
                let goal = problem.goal(&mut sg);
                clock.examined += 1;
                if let Some(g) = sg.solve(goal, &aux) {
                    found = Some(g);
                    break;
                }
                explored = Some(n);
            }
        }
        Strategy::Enumerate => {
            let padded = sig.union(&Signature::new([aux.clone()], Vec::<RoleName>::new()));
            let feasible = (first..=opts.max_nodes).take_while(|&n| padded.slots(n) <= MAX_SLOTS).last();
            if opts.max_nodes >= first && feasible.is_none() {
                return Err(AnalysisError::SearchSpace { nodes: first, slots: padded.slots(first) });
            }
            let top = feasible.unwrap_or(opts.max_nodes);
            let mut stream = GraphStream::new(&sig, &required, top, Padding::Pad(aux.clone()));
            while let Some(g) = stream.next() {
                let size = stream.current_size().expect("a level is open");
                if size > first {
                    explored = explored.max(Some(size - 1));
                }
                if clock.exhausted() {
                    exhausted = true;
                    break;
                }
                clock.examined += 1;
                if problem.check(&g, opts.semantics)? {
                    found = Some(g);
                    break;
                }
            }
            if found.is_none() && !exhausted && opts.max_nodes >= first {
                if top < opts.max_nodes {
                    return Err(AnalysisError::SearchSpace { nodes: top + 1, slots: padded.slots(top + 1) });
                }
                explored = Some(top);
            }
        }
    }
    let verdict = match found {
        Some(g) => {
            let g = if opts.minimize { minimize(problem, g, opts.semantics, &required)? } else { g };
            if !problem.check(&g, opts.semantics)? {
                return Err(AnalysisError::ReplayFailed("validation"));
            }
            if opts.semantics == Semantics::Wf && !problem.check_mu(&g)? {
                return Err(AnalysisError::ReplayFailed("formula evaluation"));
            }
            Verdict::Witness(g)
        }
        None => Verdict::NoWitnessUpTo(explored.unwrap_or(0)),
    };
    Ok(SearchOutcome {
        verdict,
        graphs_examined: clock.examined,
        bound: opts.max_nodes,
        elapsed_ms: clock.elapsed_ms(),
        budget_exhausted: exhausted,
    })
}

fn minimize(problem: &Problem, mut g: DataGraph, semantics: Semantics, required: &BTreeSet<NodeId>) -> Result<DataGraph, AnalysisError> {
    let concepts: Vec<(ConceptName, NodeId)> = g.concept_assertions().iter().cloned().collect();
    let roles: Vec<_> = g.role_assertions().iter().cloned().collect();
    for (r, a, b) in roles {
        g.remove_role(&r, &a, &b);
        if !required.is_subset(&g.domain()) || !problem.check(&g, semantics)? {
            g.add_role(r, a, b);
        }
    }
    for (c, a) in concepts {
        g.remove_concept(&c, &a);
        if !required.is_subset(&g.domain()) || !problem.check(&g, semantics)? {
            g.add_concept(c, a);
        }
    }
    Ok(g)
}

/// Searches for a graph where some node validates `s` in the well-founded
/// model of `c` restricted to `s`.
pub fn shape_sat_bounded(c: &ConstraintSet, s: &ShapeName, max_nodes: usize) -> Result<SearchOutcome, AnalysisError> {
    shape_sat_with(c, s, &SearchOptions::new(max_nodes))
}

/// [`shape_sat_bounded`] with explicit options.
pub fn shape_sat_with(c: &ConstraintSet, s: &ShapeName, opts: &SearchOptions) -> Result<SearchOutcome, AnalysisError> {
    search(&Problem::shape(c, s)?, opts)
}

/// Searches for a compatible graph validating `d`.
pub fn doc_sat_bounded(d: &Document, max_nodes: usize) -> Result<SearchOutcome, AnalysisError> {
    doc_sat_with(d, &SearchOptions::new(max_nodes))
}

/// [`doc_sat_bounded`] with explicit options.
pub fn doc_sat_with(d: &Document, opts: &SearchOptions) -> Result<SearchOutcome, AnalysisError> {
    search(&Problem::docs(d, None)?, opts)
}

/// Searches for a counterexample to `d1 ⊨ d2`: a compatible graph validating
/// `d1` but not `d2`.
pub fn implies_bounded(d1: &Document, d2: &Document, max_nodes: usize) -> Result<SearchOutcome, AnalysisError> {
    implies_with(d1, d2, &SearchOptions::new(max_nodes))
}

/// [`implies_bounded`] with explicit options.
pub fn implies_with(d1: &Document, d2: &Document, opts: &SearchOptions) -> Result<SearchOutcome, AnalysisError> {
    search(&Problem::docs(d1, Some(d2))?, opts)
}

/// Per-node comparison of well-founded validation against formula evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    /// Nodes `c` with `s(c)` in the well-founded model.
    pub wf_extension: BTreeSet<NodeId>,
    /// Nodes satisfying the translated formula.
    pub formula_extension: BTreeSet<NodeId>,
    /// Nodes where the two disagree.
    pub disagreements: BTreeSet<NodeId>,
}

impl CrossCheck {
    /// Whether both routes agree everywhere.
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares `WF(g, c_s)` on `s` with the evaluation of the translation of `s`.
pub fn crosscheck(g: &DataGraph, c: &ConstraintSet, s: &ShapeName) -> Result<CrossCheck, AnalysisError> {
    let cs = c.restrict_to(s)?;
    let wf_extension = well_founded_model(g, &cs)?.model.extension(s);
    let f = Translator::new().translate_shape(&cs, s)?;
    let formula_extension = eval(&f, g, &Valuation::new())?;
    let disagreements = wf_extension.symmetric_difference(&formula_extension).cloned().collect();
    Ok(CrossCheck { wf_extension, formula_extension, disagreements })
}

/// `g` extended with a hub node carrying a `p`-self-loop and `p`-edges to
/// every node; returns the graph and the hub.
pub fn with_hub(g: &DataGraph, p: &RoleName) -> (DataGraph, NodeId) {
    let dom = g.domain();
    let hub = (0..).map(|i| NodeId::new(format!("__hub{i}"))).find(|h| !dom.contains(h)).expect("infinitely many candidates");
    let mut out = g.clone();
    out.add_role(p.clone(), hub.clone(), hub.clone());
    for a in &dom {
        out.add_role(p.clone(), hub.clone(), a.clone());
    }
    (out, hub)
}

/// Decides `g ⊨ d` through the propagated target formula: evaluates
/// `⋀_{a∈I} ⟨p⟩(a ∧ Λ_d)` (or `⟨p⟩Λ_d` without individuals) at a hub node.
pub fn validates_via_lambda(g: &DataGraph, d: &Document) -> Result<bool, AnalysisError> {
    crate::wf::ensure_compatible(g, d)?;
    let p = fresh_role(&[d]);
    let lam = Translator::new().lambda(d, &p)?;
    let pr = Role::forward(p.clone());
    let ind = d.individuals();
    let f = if ind.is_empty() {
        MuFormula::diamond(pr, lam)
    } else {
        MuFormula::conj(ind.iter().map(|a| MuFormula::diamond(pr.clone(), MuFormula::and(MuFormula::Nominal(a.clone()), lam.clone()))))
    };
    let (gh, hub) = with_hub(g, &p);
    Ok(eval(&f, &gh, &Valuation::new())?.contains(&hub))
}

/// Decides whether `g` is a counterexample to `d1 ⊨ d2` by evaluating the
/// implication formula at a hub node.
pub fn counterexample_via_formula(g: &DataGraph, d1: &Document, d2: &Document) -> Result<bool, AnalysisError> {
    crate::wf::ensure_compatible(g, d1)?;
    crate::wf::ensure_compatible(g, d2)?;
    let (f, p) = crate::translate::implication_formula(d1, d2)?;
    let (gh, hub) = with_hub(g, &p);
    Ok(eval(&f, &gh, &Valuation::new())?.contains(&hub))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_ex1() -> ConstraintSet {
        ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t").unwrap()
    }

    fn doc(text: &str) -> Document {
        Document::parse(text).unwrap()
    }

    #[test]
    fn example_set_has_a_one_node_witness() {
        for strategy in [Strategy::Symbolic, Strategy::Enumerate] {
            let out = shape_sat_with(&c_ex1(), &"s".into(), &SearchOptions::new(7).with_strategy(strategy)).unwrap();
            assert_eq!(format!("{:?}", out.witness().unwrap()), "{A(0)}");
        }
    }

    #[test]
    fn contradictory_shape_has_no_witness() {
        let c = ConstraintSet::parse("s <- A & !s'\ns' <- A").unwrap();
        for strategy in [Strategy::Symbolic, Strategy::Enumerate] {
            let out = shape_sat_with(&c, &"s".into(), &SearchOptions::new(3).with_strategy(strategy)).unwrap();
            assert_eq!(out.verdict, Verdict::NoWitnessUpTo(3));
        }
    }

    #[test]
    fn disjunction_does_not_imply_disjunct() {
        let d1 = doc("s <- A | B\ntarget node <a> s");
        let d2 = doc("s' <- A\ntarget node <a> s'");
        for strategy in [Strategy::Symbolic, Strategy::Enumerate] {
            let out = implies_with(&d1, &d2, &SearchOptions::new(3).with_strategy(strategy)).unwrap();
            assert_eq!(format!("{:?}", out.witness().unwrap()), "{B(a)}");
        }
        let out = implies_bounded(&d2, &d1, 4).unwrap();
        assert_eq!(out.verdict, Verdict::NoWitnessUpTo(4));
    }

    #[test]
    fn crosscheck_on_the_example_graphs() {
        let g1 = DataGraph::parse("p(0,1) p(1,2) p(2,3) p(3,4) p(4,5) p(5,6)\nr(1,1) r(2,2) r(3,3) r(4,4) r(5,5) r(6,6)\nA(6)").unwrap();
        let cc = crosscheck(&g1, &c_ex1(), &"s".into()).unwrap();
        assert!(cc.agrees());
        assert_eq!(cc.wf_extension.len(), 7);
        let g2 = DataGraph::parse("p(0,1) p(1,0)").unwrap();
        let cc = crosscheck(&g2, &c_ex1(), &"s".into()).unwrap();
        assert!(cc.agrees() && cc.wf_extension.is_empty());
    }

    #[test]
    fn lambda_route_matches_validation() {
        let d = doc("s <- A | B\ntarget class B s\ntarget node <a> s");
        for text in ["B(a)", "B(a) r(a,b)", "C(a) B(b)", "A(a)"] {
            let g = DataGraph::parse(text).unwrap();
            assert_eq!(validates_via_lambda(&g, &d).unwrap(), validate_document(&g, &d).unwrap(), "{text}");
        }
    }

    #[test]
    fn budget_stops_the_search() {
        let c = ConstraintSet::parse("s <- A & !s'\ns' <- A").unwrap();
        let opts = SearchOptions::new(5).with_strategy(Strategy::Enumerate).with_budget(Budget { max_millis: None, max_graphs: Some(3) });
        let out = shape_sat_with(&c, &"s".into(), &opts).unwrap();
        assert!(out.budget_exhausted);
        assert_eq!(out.graphs_examined, 3);
        assert!(matches!(out.verdict, Verdict::NoWitnessUpTo(n) if n < 5));
    }
}
