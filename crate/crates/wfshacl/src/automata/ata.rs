//! The two-way alternating parity tree automaton of a constraint set: its
//! states, alphabet, transition function and priorities.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ConceptName, ConstraintSet, Document, NodeId, Role, ShapeExpr, ShapeName, TargetSubject};

use super::guess::Guess;
use super::pbf::{Direction, Pbf};
use super::AutomataError;

/// A state of `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum State {
    /// `⊥`: accepts exactly padding nodes.
    Bot,
    /// `q̃`: the initial state.
    Init,
    /// `q0`: checks the root's children against the guess.
    Q0,
    /// `q0'`: verifies the guessed types and starts the shape check.
    Q0p,
    /// `q_i` (1-based): the `i`-th slot carries the guessed label.
    Slot(usize),
    /// `q`: no nominal below.
    Q,
    /// `q'`: visits every node, enforcing universal claims made at nominals.
    Qp,
    /// `q''`: the root's children are not entered through a role.
    Qpp,
    /// `tr⁺(φ)`.
    Pos(ShapeExpr),
    /// `tr⁻(φ)`.
    Neg(ShapeExpr),
    /// `r`: the node is entered through `r`.
    Role(Role),
    /// `¬r`: the node is not entered through `r`.
    NotRole(Role),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Bot => write!(f, "⊥"),
            State::Init => write!(f, "q~"),
            State::Q0 => write!(f, "q0"),
            State::Q0p => write!(f, "q0'"),
            State::Slot(i) => write!(f, "q{i}"),
            State::Q => write!(f, "q"),
            State::Qp => write!(f, "q'"),
            State::Qpp => write!(f, "q''"),
            State::Pos(e) => write!(f, "tr+({e})"),
            State::Neg(e) => write!(f, "tr-({e})"),
            State::Role(r) => write!(f, "{r}"),
            State::NotRole(r) => write!(f, "¬{r}"),
        }
    }
}

/// An element of a node label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    /// A concept name holding at the node.
    Concept(ConceptName),
    /// The nominal naming the node.
    Nominal(NodeId),
    /// The node is an `r`-successor of its parent.
    Role(Role),
    /// `→r a`: the node has `a` as an `r`-successor.
    Arrival(Role, NodeId),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Concept(c) => write!(f, "{c}"),
            Letter::Nominal(a) => write!(f, "<{a}>"),
            Letter::Role(r) => write!(f, "^{r}"),
            Letter::Arrival(r, a) => write!(f, "->{r} <{a}>"),
        }
    }
}

/// A symbol of `Σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    /// Padding.
    Bot,
    /// The root of the encoding.
    Root,
    /// An ordinary node label.
    Label(BTreeSet<Letter>),
}

impl Symbol {
    /// The letters of an ordinary label (empty for `⊥` and `root`).
    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        match self {
            Symbol::Label(ls) => Some(ls.iter()),
            _ => None,
        }
        .into_iter()
        .flatten()
    }

    /// Whether the label contains a letter.
    pub fn has(&self, l: &Letter) -> bool {
        matches!(self, Symbol::Label(ls) if ls.contains(l))
    }

    /// Parses `root`, `bot`, or `{L, …}` with letters `A`, `<a>`, `^r`, `^r-`,
    /// `->r <a>`.
    pub fn parse(text: &str) -> Result<Self, AutomataError> {
        let t = text.trim();
        match t {
            "root" => return Ok(Symbol::Root),
            "bot" | "⊥" => return Ok(Symbol::Bot),
            _ => {}
        }
        let inner = t.strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(|| AutomataError::BadSymbol(text.to_string()))?;
        let mut out = BTreeSet::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.insert(parse_letter(part).ok_or_else(|| AutomataError::BadSymbol(text.to_string()))?);
        }
        Ok(Symbol::Label(out))
    }
}

fn parse_role(t: &str) -> Option<Role> {
    let t = t.trim();
    let (name, inv) = match t.strip_suffix('-') {
        Some(n) => (n, true),
        None => (t, false),
    };
    let ok = !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    ok.then(|| if inv { Role::inverse(name) } else { Role::forward(name) })
}

fn parse_nominal(t: &str) -> Option<NodeId> {
    let n = t.trim().strip_prefix('<')?.strip_suffix('>')?;
    (!n.is_empty()).then(|| NodeId::from(n))
}

fn parse_letter(t: &str) -> Option<Letter> {
    if let Some(rest) = t.strip_prefix("->") {
        let (r, a) = rest.trim().split_once(char::is_whitespace)?;
        return Some(Letter::Arrival(parse_role(r)?, parse_nominal(a)?));
    }
    if let Some(r) = t.strip_prefix('^') {
        return parse_role(r).map(Letter::Role);
    }
    if t.starts_with('<') {
        return parse_nominal(t).map(Letter::Nominal);
    }
    let ok = !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_');
    ok.then(|| Letter::Concept(ConceptName::new(t)))
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Bot => write!(f, "bot"),
            Symbol::Root => write!(f, "root"),
            Symbol::Label(ls) => {
                let parts: Vec<String> = ls.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// How claims about nominals reached through `→r a` are discharged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Trust the guess: `⊤`/`⊥` shortcuts read off `γ_{f(i)}`. This accepts
    /// circular justifications through nominals (e.g. `s ← ∃r.s` on a nominal
    /// self-loop when `s` is guessed), so emptiness over it is not sound.
    Table,
    /// Jump to the nominal's slot and re-check the claim there, so least
    /// fixpoints through nominals keep their odd priority.
    #[default]
    Anchored,
}

/// What the automaton accepts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Goal {
    /// Some node satisfies the shape.
    Shape(ShapeName),
    /// The encoded graph validates the targets.
    Targets(Vec<crate::model::Target>),
}

/// A two-way alternating parity tree automaton for one guess.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoAta {
    variant: Variant,
    constraints: ConstraintSet,
    goal: Goal,
    guess: Guess,
    universe: BTreeSet<ShapeExpr>,
    sub: BTreeSet<ShapeExpr>,
    concepts: BTreeSet<ConceptName>,
    roles: BTreeSet<Role>,
    k: usize,
}

/// `A(C, s, G)` with the anchored variant.
pub fn build_2ata(c: &ConstraintSet, s: &ShapeName, guess: &Guess) -> Result<TwoAta, AutomataError> {
    build_2ata_with(c, s, guess, Variant::Anchored)
}

/// `A(C, s, G)` with a chosen variant.
pub fn build_2ata_with(c: &ConstraintSet, s: &ShapeName, guess: &Guess, variant: Variant) -> Result<TwoAta, AutomataError> {
    let cn = normalized(c)?;
    cn.body(s)?;
    let nominals = cn.nominals();
    TwoAta::new(variant, cn, Goal::Shape(s.clone()), guess, nominals, BTreeSet::new(), BTreeSet::new())
}

/// The document automaton with the anchored variant.
pub fn build_doc_2ata(d: &Document, guess: &Guess) -> Result<TwoAta, AutomataError> {
    build_doc_2ata_with(d, guess, Variant::Anchored)
}

/// The document automaton: the initial shape check is replaced by target
/// checks at slots (node targets) and during the `q'` sweep (class and role
/// targets).
pub fn build_doc_2ata_with(d: &Document, guess: &Guess, variant: Variant) -> Result<TwoAta, AutomataError> {
    d.check_well_formed()?;
    let cn = normalized(&d.constraints)?;
    let extra_roles = d
        .targets
        .iter()
        .filter_map(|t| match &t.subject {
            TargetSubject::Role(r) => Some(r.clone()),
            _ => None,
        })
        .collect();
    let extra_concepts = d
        .targets
        .iter()
        .filter_map(|t| match &t.subject {
            TargetSubject::Class(a) => Some(a.clone()),
            _ => None,
        })
        .collect();
    TwoAta::new(variant, cn, Goal::Targets(d.targets.clone()), guess, d.individuals(), extra_concepts, extra_roles)
}

fn normalized(c: &ConstraintSet) -> Result<ConstraintSet, AutomataError> {
    c.check_defined()?;
    Ok(if c.is_normal() { c.clone() } else { c.normalize()? })
}

/// `sub(C) ∪ {s, ¬s | s defined} ∪ nominals`: the formulas with `tr±` states.
pub fn type_universe(c: &ConstraintSet, nominals: &BTreeSet<NodeId>) -> BTreeSet<ShapeExpr> {
    let mut u = c.sub();
    for s in c.heads() {
        u.insert(ShapeExpr::Shape(s.clone()));
        u.insert(ShapeExpr::NotShape(s.clone()));
    }
    u.extend(nominals.iter().cloned().map(ShapeExpr::Nominal));
    u
}

impl TwoAta {
    fn new(
        variant: Variant,
        constraints: ConstraintSet,
        goal: Goal,
        guess: &Guess,
        nominals: BTreeSet<NodeId>,
        extra_concepts: BTreeSet<ConceptName>,
        extra_roles: BTreeSet<Role>,
    ) -> Result<Self, AutomataError> {
        let expected: Vec<NodeId> = nominals.iter().cloned().collect();
        if guess.nominals != expected || !guess.check_invariants() {
            return Err(AutomataError::GuessMismatch);
        }
        let universe = type_universe(&constraints, &nominals);
        let sub = constraints.sub();
        let mut concepts = constraints.concepts();
        concepts.extend(extra_concepts);
        let mut roles = BTreeSet::new();
        for r in constraints.roles().into_iter().chain(extra_roles) {
            roles.insert(r.invert());
            roles.insert(r);
        }
        let exists = sub.iter().filter(|e| matches!(e, ShapeExpr::Exists(..))).count();
        let k = exists.max(nominals.len()) + 1;
        Ok(TwoAta { variant, constraints, goal, guess: guess.clone(), universe, sub, concepts, roles, k })
    }

    /// The variant.
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The normalised constraint set.
    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// The guess.
    pub fn guess(&self) -> &Guess {
        &self.guess
    }

    /// `a₁ … a_l`.
    pub fn nominals(&self) -> &[NodeId] {
        &self.guess.nominals
    }

    /// `l`.
    pub fn l(&self) -> usize {
        self.guess.len()
    }

    /// The nominal branching `k = max(#∃-subformulas, l) + 1`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Concept names of the alphabet.
    pub fn concepts(&self) -> &BTreeSet<ConceptName> {
        &self.concepts
    }

    /// Roles of the alphabet, closed under inversion.
    pub fn roles(&self) -> &BTreeSet<Role> {
        &self.roles
    }

    /// The shape checked, for shape automata.
    pub fn shape(&self) -> Option<&ShapeName> {
        match &self.goal {
            Goal::Shape(s) => Some(s),
            Goal::Targets(_) => None,
        }
    }

    /// `q̃`.
    pub fn initial(&self) -> State {
        State::Init
    }

    /// `Q`, in a fixed order.
    pub fn states(&self) -> Vec<State> {
        let mut q = vec![State::Bot, State::Init, State::Q0, State::Q0p];
        q.extend((1..=self.l()).map(State::Slot));
        q.extend([State::Q, State::Qp, State::Qpp]);
        q.extend(self.universe.iter().cloned().map(State::Pos));
        q.extend(self.universe.iter().cloned().map(State::Neg));
        q.extend(self.roles.iter().cloned().map(State::Role));
        q.extend(self.roles.iter().cloned().map(State::NotRole));
        q
    }

    /// `Ω(q)`: 1 exactly for `tr⁺(φ)` with `φ ∈ sub(C)`.
    pub fn priority(&self, q: &State) -> u8 {
        match q {
            State::Pos(e) if self.sub.contains(e) => 1,
            _ => 0,
        }
    }

    fn at(d: Direction, q: State) -> Pbf {
        Pbf::atom(d, q)
    }

    fn stay(q: State) -> Pbf {
        Pbf::atom(Direction::Stay, q)
    }

    fn children(k: usize) -> impl Iterator<Item = Direction> {
        (1..=k).map(Direction::Child)
    }

    /// Nominals `a` with `→r a ∈ σ`, as `(slot, a)`.
    fn arrivals<'a>(&'a self, sigma: &'a Symbol, r: &'a Role) -> impl Iterator<Item = (usize, &'a NodeId)> + 'a {
        sigma.letters().filter_map(move |l| match l {
            Letter::Arrival(r2, a) if r2 == r => self.guess.slot_of(a).map(|i| (i, a)),
            _ => None,
        })
    }

    fn has_type(&self, slot: usize, e: &ShapeExpr) -> bool {
        self.guess.slot(slot).is_some_and(|g| g.contains(e))
    }

    /// `δ(q, σ)` at a node with `k` children.
    pub fn delta(&self, q: &State, sigma: &Symbol, k: usize) -> Pbf {
        let is_root = *sigma == Symbol::Root;
        if *sigma == Symbol::Bot {
            match q {
                State::Bot | State::Qpp | State::Q => return Pbf::True,
                State::Slot(i) => return Pbf::constant(self.guess.slot(*i).is_none()),
                _ => return Pbf::False,
            }
        }
        match q {
            State::Bot => Pbf::False,
            State::Init => Pbf::and([Self::stay(State::Q0), Self::stay(State::Q0p)]),
            State::Q0 => {
                if !is_root {
                    return Pbf::False;
                }
                let l = self.l();
                Pbf::and(
                    (1..=l)
                        .map(|i| Self::at(Direction::Child(i), State::Slot(i)))
                        .chain((l + 1..=k).map(|i| Self::at(Direction::Child(i), State::Q)))
                        .chain(Self::children(k).map(|d| Self::at(d, State::Qpp))),
                )
            }
            State::Q0p => {
                let gammas = (1..=self.l()).map(|i| self.gamma(i));
                let start = match &self.goal {
                    Goal::Shape(s) => Pbf::or(Self::children(k).map(|d| Self::at(d, State::Pos(ShapeExpr::Shape(s.clone()))))),
                    Goal::Targets(_) => Pbf::True,
                };
                let sweep = Self::children(k).map(|d| Pbf::or([Self::at(d.clone(), State::Qp), Self::at(d, State::Bot)]));
                Pbf::and(gammas.chain([start]).chain(sweep))
            }
            State::Slot(i) => {
                if is_root {
                    return Pbf::False;
                }
                let fixed = |e: &ShapeExpr| matches!(e, ShapeExpr::Concept(_) | ShapeExpr::Nominal(_));
                let guessed: BTreeSet<Letter> = self
                    .guess
                    .slot(*i)
                    .into_iter()
                    .flatten()
                    .filter(|e| fixed(e))
                    .map(|e| match e {
                        ShapeExpr::Concept(c) => Letter::Concept(c.clone()),
                        ShapeExpr::Nominal(a) => Letter::Nominal(a.clone()),
                        _ => unreachable!("filtered"),
                    })
                    .collect();
                let seen: BTreeSet<Letter> =
                    sigma.letters().filter(|l| matches!(l, Letter::Concept(_) | Letter::Nominal(_))).cloned().collect();
                if guessed != seen {
                    return Pbf::False;
                }
                let connected = self
                    .guess
                    .connections
                    .iter()
                    .all(|(a, r, b)| !sigma.has(&Letter::Nominal(a.clone())) || sigma.has(&Letter::Arrival(r.clone(), b.clone())));
                if !connected {
                    return Pbf::False;
                }
                Pbf::and(Self::children(k).map(|d| Self::at(d, State::Q)))
            }
            State::Q => {
                if is_root || sigma.letters().any(|l| matches!(l, Letter::Nominal(_))) {
                    return Pbf::False;
                }
                Pbf::and(Self::children(k).map(|d| Self::at(d, State::Q)))
            }
            State::Qpp => Pbf::constant(!is_root && !sigma.letters().any(|l| matches!(l, Letter::Role(_)))),
            State::Qp => {
                if is_root {
                    return Pbf::False;
                }
                let mut parts: Vec<Pbf> =
                    Self::children(k).map(|d| Pbf::or([Self::at(d.clone(), State::Qp), Self::at(d, State::Bot)])).collect();
                for l in sigma.letters() {
                    let Letter::Arrival(rho, a) = l else { continue };
                    let Some(i) = self.guess.slot_of(a) else { continue };
                    let back = rho.invert();
                    for e in self.guess.slot(i).into_iter().flatten() {
                        match e {
                            ShapeExpr::Forall(r, b) if *r == back => parts.push(Self::stay(State::Pos((**b).clone()))),
                            ShapeExpr::NotShape(s2) => {
                                if let Ok(ShapeExpr::Exists(r, b)) = self.constraints.body(s2) {
                                    if *r == back {
                                        parts.push(Self::stay(State::Neg((**b).clone())));
                                    }
                                }
                            }
                            _ => {}
                        }
                    }
                }
                if let Goal::Targets(ts) = &self.goal {
                    for t in ts {
                        let check = Self::stay(State::Pos(ShapeExpr::Shape(t.shape.clone())));
                        match &t.subject {
                            TargetSubject::Node(_) => {}
                            TargetSubject::Class(a) => {
                                if sigma.has(&Letter::Concept(a.clone())) {
                                    parts.push(check);
                                }
                            }
                            TargetSubject::Role(r) => {
                                let certain = sigma.has(&Letter::Role(r.invert()))
                                    || sigma.letters().any(|l| matches!(l, Letter::Arrival(r2, _) if r2 == r));
                                if certain {
                                    parts.push(check);
                                } else {
                                    let none = Pbf::and(
                                        Self::children(k)
                                            .map(|d| Pbf::or([Self::at(d.clone(), State::NotRole(r.clone())), Self::at(d, State::Bot)])),
                                    );
                                    parts.push(Pbf::or([check, none]));
                                }
                            }
                        }
                    }
                }
                Pbf::and(parts)
            }
            State::Role(r) => Pbf::constant(sigma.has(&Letter::Role(r.clone()))),
            State::NotRole(r) => Pbf::constant(!is_root && !sigma.has(&Letter::Role(r.clone()))),
            State::Pos(e) => self.delta_pos(e, sigma, k),
            State::Neg(e) => self.delta_neg(e, sigma, k, is_root),
        }
    }

    /// `Γ(i)`: the guessed type of slot `i` (plus node targets in documents).
    fn gamma(&self, i: usize) -> Pbf {
        let d = Direction::Child(i);
        match self.guess.slot(i) {
            None => Self::at(d, State::Bot),
            Some(g) => {
                let mut parts: Vec<Pbf> = g.iter().map(|e| Self::at(d.clone(), State::Pos(e.clone()))).collect();
                if let Goal::Targets(ts) = &self.goal {
                    for t in ts {
                        if let TargetSubject::Node(a) = &t.subject {
                            if self.guess.slot_of(a) == Some(i) {
                                parts.push(Self::at(d.clone(), State::Pos(ShapeExpr::Shape(t.shape.clone()))));
                            }
                        }
                    }
                }
                Pbf::and(parts)
            }
        }
    }

    fn body_of(&self, s: &ShapeName) -> ShapeExpr {
        self.constraints.body(s).cloned().unwrap_or_else(|_| ShapeExpr::Shape(s.clone()))
    }

    /// `((−1, q) ∨ (0, ¬r⁻)) ∧ ⋀_j ((j, q) ∨ (j, ¬r) ∨ (j, ⊥))`.
    fn all_neighbours(r: &Role, q: State, k: usize) -> Pbf {
        let parent = Pbf::or([Self::at(Direction::Up, q.clone()), Self::stay(State::NotRole(r.invert()))]);
        let kids = Self::children(k)
            .map(|d| Pbf::or([Self::at(d.clone(), q.clone()), Self::at(d.clone(), State::NotRole(r.clone())), Self::at(d, State::Bot)]));
        Pbf::and(std::iter::once(parent).chain(kids))
    }

    /// `⋁_j ((j, q) ∧ (j, r))`.
    fn some_child(r: &Role, q: State, k: usize) -> Pbf {
        Pbf::or(Self::children(k).map(|d| Pbf::and([Self::at(d.clone(), q.clone()), Self::at(d, State::Role(r.clone()))])))
    }

    fn delta_pos(&self, e: &ShapeExpr, sigma: &Symbol, k: usize) -> Pbf {
        match e {
            ShapeExpr::Concept(c) => Pbf::constant(sigma.has(&Letter::Concept(c.clone()))),
            ShapeExpr::Nominal(a) => Pbf::constant(sigma.has(&Letter::Nominal(a.clone()))),
            ShapeExpr::And(l, r) => Pbf::and([Self::stay(State::Pos((**l).clone())), Self::stay(State::Pos((**r).clone()))]),
            ShapeExpr::Or(l, r) => Pbf::or([Self::stay(State::Pos((**l).clone())), Self::stay(State::Pos((**r).clone()))]),
            ShapeExpr::NotShape(s) => Self::stay(State::Neg(ShapeExpr::Shape(s.clone()))),
            ShapeExpr::Shape(s) => Self::stay(State::Pos(self.body_of(s))),
            ShapeExpr::Exists(r, b) => {
                let target = State::Pos((**b).clone());
                match self.variant {
                    Variant::Table => {
                        if self.arrivals(sigma, r).any(|(i, _)| self.has_type(i, b)) {
                            Pbf::True
                        } else {
                            Self::some_child(r, target, k)
                        }
                    }
                    Variant::Anchored => {
                        let jumps: Vec<Pbf> =
                            self.arrivals(sigma, r).map(|(i, _)| Self::at(Direction::Anchor(i), target.clone())).collect();
                        Pbf::or(jumps.into_iter().chain([Self::some_child(r, target, k)]))
                    }
                }
            }
            ShapeExpr::Forall(r, b) => {
                let target = State::Pos((**b).clone());
                match self.variant {
                    Variant::Table => {
                        if self.arrivals(sigma, r).any(|(i, _)| !self.has_type(i, b)) {
                            Pbf::False
                        } else {
                            Self::all_neighbours(r, target, k)
                        }
                    }
                    Variant::Anchored => {
                        let jumps: Vec<Pbf> =
                            self.arrivals(sigma, r).map(|(i, _)| Self::at(Direction::Anchor(i), target.clone())).collect();
                        Pbf::and(jumps.into_iter().chain([Self::all_neighbours(r, target, k)]))
                    }
                }
            }
        }
    }

    fn delta_neg(&self, e: &ShapeExpr, sigma: &Symbol, k: usize, is_root: bool) -> Pbf {
        let negated = |b: &ShapeExpr| match b {
            ShapeExpr::Shape(s) => ShapeExpr::NotShape(s.clone()),
            other => other.clone(),
        };
        match e {
            ShapeExpr::Concept(c) => Pbf::constant(!is_root && !sigma.has(&Letter::Concept(c.clone()))),
            ShapeExpr::Nominal(a) => Pbf::constant(!is_root && !sigma.has(&Letter::Nominal(a.clone()))),
            ShapeExpr::And(l, r) => Pbf::or([Self::stay(State::Neg((**l).clone())), Self::stay(State::Neg((**r).clone()))]),
            ShapeExpr::Or(l, r) => Pbf::and([Self::stay(State::Neg((**l).clone())), Self::stay(State::Neg((**r).clone()))]),
            ShapeExpr::NotShape(s) => Self::stay(State::Pos(ShapeExpr::Shape(s.clone()))),
            ShapeExpr::Shape(s) => Self::stay(State::Neg(self.body_of(s))),
            ShapeExpr::Exists(r, b) => {
                let target = State::Neg((**b).clone());
                match self.variant {
                    Variant::Table => {
                        if self.arrivals(sigma, r).any(|(i, _)| !self.has_type(i, &negated(b))) {
                            Pbf::False
                        } else {
                            Self::all_neighbours(r, target, k)
                        }
                    }
                    Variant::Anchored => {
                        let jumps: Vec<Pbf> =
                            self.arrivals(sigma, r).map(|(i, _)| Self::at(Direction::Anchor(i), target.clone())).collect();
                        Pbf::and(jumps.into_iter().chain([Self::all_neighbours(r, target, k)]))
                    }
                }
            }
            ShapeExpr::Forall(r, b) => {
                let target = State::Neg((**b).clone());
                match self.variant {
                    Variant::Table => {
                        if self.arrivals(sigma, r).any(|(i, _)| self.has_type(i, &negated(b))) {
                            Pbf::True
                        } else {
                            Self::some_child(r, target, k)
                        }
                    }
                    Variant::Anchored => {
                        let jumps: Vec<Pbf> =
                            self.arrivals(sigma, r).map(|(i, _)| Self::at(Direction::Anchor(i), target.clone())).collect();
                        Pbf::or(jumps.into_iter().chain([Self::some_child(r, target, k)]))
                    }
                }
            }
        }
    }

    /// A human-readable listing of `Q`, `Ω` and `δ` on the given symbols
    /// (with the nominal branching `k`).
    pub fn dump(&self, symbols: &[Symbol]) -> String {
        let mut out = String::new();
        let goal = match &self.goal {
            Goal::Shape(s) => format!("shape {s}"),
            Goal::Targets(ts) => format!("{} target(s)", ts.len()),
        };
        out.push_str(&format!("variant: {:?}\ngoal: {goal}\nk = {}, l = {}\n", self.variant, self.k, self.l()));
        out.push_str("guess:\n");
        for line in self.guess.to_string().lines() {
            out.push_str(&format!("  {line}\n"));
        }
        let states = self.states();
        out.push_str(&format!("states ({}):\n", states.len()));
        for q in &states {
            out.push_str(&format!("  {q}  Ω={}\n", self.priority(q)));
        }
        out.push_str("transitions:\n");
        for sigma in symbols {
            for q in &states {
                out.push_str(&format!("  δ({q}, {sigma}) = {}\n", self.delta(q, sigma, self.k)));
            }
        }
        out
    }
}
