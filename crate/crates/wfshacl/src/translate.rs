//! Translation of constraint sets into μ-calculus formulas (`tr⁺`/`tr⁻`), the
//! per-node target formula `Θ`, its propagation `Λ`, and the formula whose
//! unsatisfiability characterises document implication.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConstraintSet, Document, ModelError, Role, RoleName, ShapeExpr, ShapeName, TargetSubject};
use crate::mu::{MuError, MuFormula, Var};

/// Default limit on the number of formula nodes a translation may build.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Translation errors.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    /// A shape name has no definition.
    #[error(transparent)]
    Model(#[from] ModelError),
    /// The output would exceed the node budget.
    #[error("translation exceeds the budget of {0} formula nodes")]
    TranslationBudget(usize),
    /// Internal formula manipulation failed.
    #[error(transparent)]
    Mu(#[from] MuError),
}

/// A visited shape name: `s` (positive) or `s̄` (barred).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SignedShape {
    /// `s`, bound by a `μ`.
    Pos(ShapeName),
    /// `s̄`, bound by a `ν`.
    Neg(ShapeName),
}

impl SignedShape {
    /// The base variable name: `X_s` or `X_~s`.
    pub fn base_var(&self) -> String {
        match self {
            SignedShape::Pos(s) => format!("X_{s}"),
            SignedShape::Neg(s) => format!("X_~{s}"),
        }
    }
}

/// The visited set `S` of the translation, each entry with the variable bound for it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationContext {
    visited: Vec<(SignedShape, Var)>,
}

impl TranslationContext {
    /// The empty context `S = ∅`.
    pub fn new() -> Self {
        Self::default()
    }

    /// `S ∪ {entry}`, bound to the entry's base variable name.
    pub fn with(&self, entry: SignedShape) -> Self {
        let var = Var::new(entry.base_var());
        self.with_var(entry, var)
    }

    fn with_var(&self, entry: SignedShape, var: Var) -> Self {
        let mut visited = self.visited.clone();
        visited.push((entry, var));
        TranslationContext { visited }
    }

    /// `pos(S)`: drops the barred entries.
    pub fn pos(&self) -> Self {
        TranslationContext { visited: self.visited.iter().filter(|(e, _)| matches!(e, SignedShape::Pos(_))).cloned().collect() }
    }

    /// The visited entries.
    pub fn entries(&self) -> impl Iterator<Item = &SignedShape> {
        self.visited.iter().map(|(e, _)| e)
    }

    fn lookup(&self, entry: &SignedShape) -> Option<&Var> {
        self.visited.iter().rev().find(|(e, _)| e == entry).map(|(_, v)| v)
    }
}

/// Builds formulas, keeping binder names unique across everything it produces
/// (a repeated binder for `X_s` becomes `X_s~2`, `X_s~3`, …) and enforcing a node budget.
#[derive(Clone, Debug)]
pub struct Translator {
    budget: usize,
    produced: usize,
    counters: BTreeMap<String, usize>,
}

impl Default for Translator {
    fn default() -> Self {
        Translator::new()
    }
}

impl Translator {
    /// A translator with the default budget.
    pub fn new() -> Self {
        Translator::with_budget(DEFAULT_NODE_BUDGET)
    }

    /// A translator that fails once more than `budget` nodes have been built.
    pub fn with_budget(budget: usize) -> Self {
        Translator { budget, produced: 0, counters: BTreeMap::new() }
    }

    /// Nodes built so far.
    pub fn produced(&self) -> usize {
        self.produced
    }

    fn tick(&mut self) -> Result<(), TranslateError> {
        self.produced += 1;
        if self.produced > self.budget {
            Err(TranslateError::TranslationBudget(self.budget))
        } else {
            Ok(())
        }
    }

    fn fresh_var(&mut self, base: String) -> Var {
        let n = self.counters.entry(base.clone()).or_insert(0);
        *n += 1;
        if *n == 1 {
            Var::new(base)
        } else {
            Var::new(format!("{base}~{n}"))
        }
    }

    /// `tr⁺_{S,C}(φ)`.
    pub fn tr_pos(&mut self, c: &ConstraintSet, ctx: &TranslationContext, phi: &ShapeExpr) -> Result<MuFormula, TranslateError> {
        self.tick()?;
        Ok(match phi {
            ShapeExpr::And(l, r) => MuFormula::and(self.tr_pos(c, ctx, l)?, self.tr_pos(c, ctx, r)?),
            ShapeExpr::Or(l, r) => MuFormula::or(self.tr_pos(c, ctx, l)?, self.tr_pos(c, ctx, r)?),
            ShapeExpr::Exists(role, b) => MuFormula::diamond(role.clone(), self.tr_pos(c, ctx, b)?),
            ShapeExpr::Forall(role, b) => MuFormula::boxed(role.clone(), self.tr_pos(c, ctx, b)?),
            ShapeExpr::Concept(a) => MuFormula::Concept(a.clone()),
            ShapeExpr::Nominal(a) => MuFormula::Nominal(a.clone()),
            ShapeExpr::NotShape(s) => return self.tr_neg(c, ctx, &ShapeExpr::Shape(s.clone())),
            ShapeExpr::Shape(s) => {
                let entry = SignedShape::Pos(s.clone());
                match ctx.lookup(&entry) {
                    Some(x) => MuFormula::Var(x.clone()),
                    None => {
                        let body = c.body(s)?;
                        let x = self.fresh_var(entry.base_var());
                        let inner = ctx.with_var(entry, x.clone());
                        MuFormula::mu(x, self.tr_pos(c, &inner, body)?)
                    }
                }
            }
        })
    }

    /// `tr⁻_{S,C}(φ)`.
    pub fn tr_neg(&mut self, c: &ConstraintSet, ctx: &TranslationContext, phi: &ShapeExpr) -> Result<MuFormula, TranslateError> {
        self.tick()?;
        Ok(match phi {
            ShapeExpr::And(l, r) => MuFormula::or(self.tr_neg(c, ctx, l)?, self.tr_neg(c, ctx, r)?),
            ShapeExpr::Or(l, r) => MuFormula::and(self.tr_neg(c, ctx, l)?, self.tr_neg(c, ctx, r)?),
            ShapeExpr::Exists(role, b) => MuFormula::boxed(role.clone(), self.tr_neg(c, ctx, b)?),
            ShapeExpr::Forall(role, b) => MuFormula::diamond(role.clone(), self.tr_neg(c, ctx, b)?),
            ShapeExpr::Concept(a) => MuFormula::NotConcept(a.clone()),
            ShapeExpr::Nominal(a) => MuFormula::NotNominal(a.clone()),
            ShapeExpr::NotShape(s) => return self.tr_pos(c, &ctx.pos(), &ShapeExpr::Shape(s.clone())),
            ShapeExpr::Shape(s) => {
                let entry = SignedShape::Neg(s.clone());
                match ctx.lookup(&entry) {
                    Some(x) => MuFormula::Var(x.clone()),
                    None => {
                        let body = c.body(s)?;
                        let x = self.fresh_var(entry.base_var());
                        let inner = ctx.with_var(entry, x.clone());
                        MuFormula::nu(x, self.tr_neg(c, &inner, body)?)
                    }
                }
            }
        })
    }

    /// `tr⁺_{∅,C}(s)`.
    pub fn translate_shape(&mut self, c: &ConstraintSet, s: &ShapeName) -> Result<MuFormula, TranslateError> {
        c.body(s)?;
        self.tr_pos(c, &TranslationContext::new(), &ShapeExpr::Shape(s.clone()))
    }

    /// `Θ`: the conjunction of the per-target formulas (`⊤` without targets).
    pub fn theta(&mut self, d: &Document) -> Result<MuFormula, TranslateError> {
        let mut parts = Vec::new();
        for t in &d.targets {
            let tr = self.translate_shape(&d.constraints, &t.shape)?;
            let guard = match &t.subject {
                TargetSubject::Node(a) => MuFormula::NotNominal(a.clone()),
                TargetSubject::Class(a) => MuFormula::NotConcept(a.clone()),
                TargetSubject::Role(r) => MuFormula::boxed(r.clone(), MuFormula::Bot),
            };
            parts.push(MuFormula::or(guard, tr));
        }
        Ok(MuFormula::conj(parts))
    }

    /// `Λ = νV.(Θ ∧ ⋀_{r ∈ R∪{p}} [r⁻]V ∧ ⋀_{r ∈ R∪{p}} [r]V)`.
    pub fn lambda(&mut self, d: &Document, p: &RoleName) -> Result<MuFormula, TranslateError> {
        let theta = self.theta(d)?;
        let n = self.counters.entry("Lam".into()).or_insert(0);
        *n += 1;
        let v = Var::new(format!("Lam~{n}"));
        let mut roles: Vec<RoleName> = d.role_names().into_iter().collect();
        roles.push(p.clone());
        let back = roles.iter().map(|r| MuFormula::boxed(Role::inverse(r.clone()), MuFormula::Var(v.clone())));
        let fwd = roles.iter().map(|r| MuFormula::boxed(Role::forward(r.clone()), MuFormula::Var(v.clone())));
        let body = MuFormula::conj(std::iter::once(theta).chain(back).chain(fwd));
        Ok(MuFormula::nu(v, body))
    }

    /// `⋀_{a∈I} ⟨p⟩(a ∧ Λ₁) ∧ ⟨p⟩¬Λ₂`, plus `⟨p⟩Λ₁` when `I = ∅` so that the
    /// first document still constrains the model.
    pub fn implication_formula(&mut self, d1: &Document, d2: &Document, p: &RoleName) -> Result<MuFormula, TranslateError> {
        let lambda1 = self.lambda(d1, p)?;
        let lambda2 = self.lambda(d2, p)?;
        let pr = Role::forward(p.clone());
        let individuals: BTreeSet<_> = d1.individuals().into_iter().chain(d2.individuals()).collect();
        let mut parts: Vec<MuFormula> = individuals
            .iter()
            .map(|a| MuFormula::diamond(pr.clone(), MuFormula::and(MuFormula::Nominal(a.clone()), lambda1.clone())))
            .collect();
        if individuals.is_empty() {
            parts.push(MuFormula::diamond(pr.clone(), lambda1));
        }
        parts.push(MuFormula::diamond(pr, lambda2.dualize()?));
        Ok(MuFormula::conj(parts))
    }
}

/// `tr⁺_{∅,C_s}(s)`, translated over the restriction of `c` to `s`.
pub fn translate(c: &ConstraintSet, s: &ShapeName) -> Result<MuFormula, TranslateError> {
    let cs = c.restrict_to(s)?;
    Translator::new().translate_shape(&cs, s)
}

/// The cleaned translation `cln(tr⁺_{∅,C_s}(s))`.
pub fn translate_clean(c: &ConstraintSet, s: &ShapeName) -> Result<MuFormula, TranslateError> {
    Ok(translate(c, s)?.clean())
}

/// `Θ` for a document.
pub fn theta(d: &Document) -> Result<MuFormula, TranslateError> {
    Translator::new().theta(d)
}

/// `Λ` for a document and role `p`.
pub fn lambda(d: &Document, p: &RoleName) -> Result<MuFormula, TranslateError> {
    Translator::new().lambda(d, p)
}

/// The smallest `__fresh_p<n>` not used by any of the documents.
pub fn fresh_role(docs: &[&Document]) -> RoleName {
    let used: BTreeSet<RoleName> = docs.iter().flat_map(|d| d.role_names()).collect();
    (0..).map(|n| RoleName::new(format!("__fresh_p{n}"))).find(|r| !used.contains(r)).expect("infinitely many candidates")
}

/// The implication formula for `d1 ⊨ d2` with a fresh role; `d1` implies `d2`
/// iff the formula is unsatisfiable.
pub fn implication_formula(d1: &Document, d2: &Document) -> Result<(MuFormula, RoleName), TranslateError> {
    let p = fresh_role(&[d1, d2]);
    Ok((Translator::new().implication_formula(d1, d2, &p)?, p))
}
