//! Negation-normal-form hybrid μ-calculus formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ConceptName, NodeId, Role};

/// A fixpoint variable name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    /// Wraps a variable name.
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    /// The name.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var({:?})", self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// A formula in negation normal form. `Top`/`Bot` abbreviate `A ∨ ¬A` / `A ∧ ¬A`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MuFormula {
    /// ⊤
    Top,
    /// ⊥
    Bot,
    /// `A`
    Concept(ConceptName),
    /// `¬A`
    NotConcept(ConceptName),
    /// The nominal `a`.
    Nominal(NodeId),
    /// `¬a`
    NotNominal(NodeId),
    /// A fixpoint variable.
    Var(Var),
    /// Conjunction.
    And(Box<MuFormula>, Box<MuFormula>),
    /// Disjunction.
    Or(Box<MuFormula>, Box<MuFormula>),
    /// `[r]Φ`
    Box(Role, Box<MuFormula>),
    /// `⟨r⟩Φ`
    Diamond(Role, Box<MuFormula>),
    /// `μX.Φ`
    Mu(Var, Box<MuFormula>),
    /// `νX.Φ`
    Nu(Var, Box<MuFormula>),
}

impl MuFormula {
    /// `A`
    pub fn concept(c: impl Into<ConceptName>) -> Self {
        MuFormula::Concept(c.into())
    }

    /// `¬A`
    pub fn not_concept(c: impl Into<ConceptName>) -> Self {
        MuFormula::NotConcept(c.into())
    }

    /// `a`
    pub fn nominal(a: impl Into<NodeId>) -> Self {
        MuFormula::Nominal(a.into())
    }

    /// `¬a`
    pub fn not_nominal(a: impl Into<NodeId>) -> Self {
        MuFormula::NotNominal(a.into())
    }

    /// `X`
    pub fn var(x: impl Into<Var>) -> Self {
        MuFormula::Var(x.into())
    }

    /// `Φ ∧ Ψ`
    pub fn and(l: MuFormula, r: MuFormula) -> Self {
        MuFormula::And(Box::new(l), Box::new(r))
    }

    /// `Φ ∨ Ψ`
    pub fn or(l: MuFormula, r: MuFormula) -> Self {
        MuFormula::Or(Box::new(l), Box::new(r))
    }

    /// `[r]Φ`
    pub fn boxed(r: Role, body: MuFormula) -> Self {
        MuFormula::Box(r, Box::new(body))
    }

    /// `⟨r⟩Φ`
    pub fn diamond(r: Role, body: MuFormula) -> Self {
        MuFormula::Diamond(r, Box::new(body))
    }

    /// `μX.Φ`
    pub fn mu(x: impl Into<Var>, body: MuFormula) -> Self {
        MuFormula::Mu(x.into(), Box::new(body))
    }

    /// `νX.Φ`
    pub fn nu(x: impl Into<Var>, body: MuFormula) -> Self {
        MuFormula::Nu(x.into(), Box::new(body))
    }

    /// Left-nested conjunction of the items; `⊤` when empty.
    pub fn conj(items: impl IntoIterator<Item = MuFormula>) -> Self {
        items.into_iter().reduce(MuFormula::and).unwrap_or(MuFormula::Top)
    }

    /// Left-nested disjunction of the items; `⊥` when empty.
    pub fn disj(items: impl IntoIterator<Item = MuFormula>) -> Self {
        items.into_iter().reduce(MuFormula::or).unwrap_or(MuFormula::Bot)
    }

    /// Direct children.
    pub fn children(&self) -> Vec<&MuFormula> {
        match self {
            MuFormula::And(l, r) | MuFormula::Or(l, r) => vec![l, r],
            MuFormula::Box(_, b) | MuFormula::Diamond(_, b) | MuFormula::Mu(_, b) | MuFormula::Nu(_, b) => vec![b],
            _ => vec![],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
        match self {
            MuFormula::Var(x) => {
                if !bound.contains(&x) {
                    out.insert(x.clone());
                }
            }
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Whether `x` occurs free.
    pub fn occurs_free(&self, x: &Var) -> bool {
        match self {
            MuFormula::Var(y) => y == x,
            MuFormula::Mu(y, b) | MuFormula::Nu(y, b) => y != x && b.occurs_free(x),
            _ => self.children().iter().any(|c| c.occurs_free(x)),
        }
    }

    /// Whether there are no free variables.
    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Whether no fixpoint binder is vacuous.
    pub fn is_clean(&self) -> bool {
        match self {
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => b.occurs_free(x) && b.is_clean(),
            _ => self.children().iter().all(|c| c.is_clean()),
        }
    }

    /// Bound variables, in pre-order.
    pub fn binders(&self) -> Vec<(&Var, bool)> {
        let mut out = Vec::new();
        self.walk(&mut |f| match f {
            MuFormula::Mu(x, _) => out.push((x, true)),
            MuFormula::Nu(x, _) => out.push((x, false)),
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a MuFormula)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Concept names mentioned.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            MuFormula::Concept(c) | MuFormula::NotConcept(c) => {
                out.insert(c.clone());
            }
            _ => {}
        });
        out
    }

    /// Nominals mentioned.
    pub fn nominals(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            MuFormula::Nominal(a) | MuFormula::NotNominal(a) => {
                out.insert(a.clone());
            }
            _ => {}
        });
        out
    }

    /// Roles used by modalities.
    pub fn roles(&self) -> BTreeSet<Role> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            MuFormula::Box(r, _) | MuFormula::Diamond(r, _) => {
                out.insert(r.clone());
            }
            _ => {}
        });
        out
    }

    /// Removes vacuous binders `σX.Φ` where `X` does not occur in `Φ`.
    pub fn clean(&self) -> MuFormula {
        match self {
            MuFormula::And(l, r) => MuFormula::and(l.clean(), r.clean()),
            MuFormula::Or(l, r) => MuFormula::or(l.clean(), r.clean()),
            MuFormula::Box(role, b) => MuFormula::boxed(role.clone(), b.clean()),
            MuFormula::Diamond(role, b) => MuFormula::diamond(role.clone(), b.clean()),
            MuFormula::Mu(x, b) if b.occurs_free(x) => MuFormula::mu(x.clone(), b.clean()),
            MuFormula::Nu(x, b) if b.occurs_free(x) => MuFormula::nu(x.clone(), b.clean()),
            MuFormula::Mu(_, b) | MuFormula::Nu(_, b) => b.clean(),
            atom => atom.clone(),
        }
    }

    /// The negation-normal-form negation of a closed formula.
    pub fn dualize(&self) -> Result<MuFormula, super::MuError> {
        if let Some(x) = self.free_vars().into_iter().next() {
            return Err(super::MuError::FreeVariable(x));
        }
        Ok(self.dual_unchecked())
    }

    fn dual_unchecked(&self) -> MuFormula {
        match self {
            MuFormula::Top => MuFormula::Bot,
            MuFormula::Bot => MuFormula::Top,
            MuFormula::Concept(c) => MuFormula::NotConcept(c.clone()),
            MuFormula::NotConcept(c) => MuFormula::Concept(c.clone()),
            MuFormula::Nominal(a) => MuFormula::NotNominal(a.clone()),
            MuFormula::NotNominal(a) => MuFormula::Nominal(a.clone()),
            MuFormula::Var(x) => MuFormula::Var(x.clone()),
            MuFormula::And(l, r) => MuFormula::or(l.dual_unchecked(), r.dual_unchecked()),
            MuFormula::Or(l, r) => MuFormula::and(l.dual_unchecked(), r.dual_unchecked()),
            MuFormula::Box(role, b) => MuFormula::diamond(role.clone(), b.dual_unchecked()),
            MuFormula::Diamond(role, b) => MuFormula::boxed(role.clone(), b.dual_unchecked()),
            MuFormula::Mu(x, b) => MuFormula::nu(x.clone(), b.dual_unchecked()),
            MuFormula::Nu(x, b) => MuFormula::mu(x.clone(), b.dual_unchecked()),
        }
    }

    /// Equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &MuFormula) -> bool {
        fn go<'a>(a: &'a MuFormula, b: &'a MuFormula, env: &mut Vec<(&'a Var, &'a Var)>) -> bool {
            use MuFormula as F;
            match (a, b) {
                (F::Var(x), F::Var(y)) => match env.iter().rev().find(|(p, q)| *p == x || *q == y) {
                    Some((p, q)) => *p == x && *q == y,
                    None => x == y,
                },
                (F::And(l1, r1), F::And(l2, r2)) | (F::Or(l1, r1), F::Or(l2, r2)) => go(l1, l2, env) && go(r1, r2, env),
                (F::Box(r1, b1), F::Box(r2, b2)) | (F::Diamond(r1, b1), F::Diamond(r2, b2)) => r1 == r2 && go(b1, b2, env),
                (F::Mu(x, b1), F::Mu(y, b2)) | (F::Nu(x, b1), F::Nu(y, b2)) => {
                    env.push((x, y));
                    let ok = go(b1, b2, env);
                    env.pop();
                    ok
                }
                (F::Mu(..), _) | (F::Nu(..), _) | (F::And(..), _) | (F::Or(..), _) | (F::Box(..), _) | (F::Diamond(..), _) => false,
                _ => a == b,
            }
        }
        go(self, other, &mut Vec::new())
    }

    /// Renames bound variables to `prefix1, prefix2, …` in pre-order (free ones untouched).
    pub fn canonical_vars(&self, prefix: &str) -> MuFormula {
        fn go(f: &MuFormula, env: &mut Vec<(Var, Var)>, next: &mut usize, prefix: &str) -> MuFormula {
            match f {
                MuFormula::Var(x) => {
                    MuFormula::Var(env.iter().rev().find(|(a, _)| a == x).map(|(_, b)| b.clone()).unwrap_or_else(|| x.clone()))
                }
                MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                    *next += 1;
                    let y = Var::new(format!("{prefix}{next}"));
                    env.push((x.clone(), y.clone()));
                    let body = go(b, env, next, prefix);
                    env.pop();
                    if matches!(f, MuFormula::Mu(..)) {
                        MuFormula::mu(y, body)
                    } else {
                        MuFormula::nu(y, body)
                    }
                }
                MuFormula::And(l, r) => MuFormula::and(go(l, env, next, prefix), go(r, env, next, prefix)),
                MuFormula::Or(l, r) => MuFormula::or(go(l, env, next, prefix), go(r, env, next, prefix)),
                MuFormula::Box(role, b) => MuFormula::boxed(role.clone(), go(b, env, next, prefix)),
                MuFormula::Diamond(role, b) => MuFormula::diamond(role.clone(), go(b, env, next, prefix)),
                atom => atom.clone(),
            }
        }
        go(self, &mut Vec::new(), &mut 0, prefix)
    }

    /// Checks that no ν-bound variable occurs free inside a μ-subformula of its
    /// binder's body; returns the offending (ν variable, μ variable) pair otherwise.
    pub fn check_limited_alternation(&self) -> Result<(), (Var, Var)> {
        let mut result = Ok(());
        self.walk(&mut |f| {
            if result.is_err() {
                return;
            }
            if let MuFormula::Nu(x, body) = f {
                if body.occurs_free(x) {
                    body.walk(&mut |g| {
                        if let MuFormula::Mu(y, inner) = g {
                            if result.is_ok() && inner.occurs_free(x) {
                                result = Err((x.clone(), y.clone()));
                            }
                        }
                    });
                }
            }
        });
        result
    }

    /// Replaces free variables by formulas (no capture avoidance: bound names must be distinct).
    pub fn substitute(&self, map: &BTreeMap<Var, MuFormula>) -> MuFormula {
        match self {
            MuFormula::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                let mut inner = map.clone();
                inner.remove(x);
                let body = b.substitute(&inner);
                if matches!(self, MuFormula::Mu(..)) {
                    MuFormula::mu(x.clone(), body)
                } else {
                    MuFormula::nu(x.clone(), body)
                }
            }
            MuFormula::And(l, r) => MuFormula::and(l.substitute(map), r.substitute(map)),
            MuFormula::Or(l, r) => MuFormula::or(l.substitute(map), r.substitute(map)),
            MuFormula::Box(role, b) => MuFormula::boxed(role.clone(), b.substitute(map)),
            MuFormula::Diamond(role, b) => MuFormula::diamond(role.clone(), b.substitute(map)),
            atom => atom.clone(),
        }
    }
}
