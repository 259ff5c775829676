//! Shape expressions of the ALCIO fragment and their subexpression closure.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::names::{ConceptName, NodeId, Role, ShapeName};

/// A shape expression. Negation applies to shape names only.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeExpr {
    /// A shape name reference `s`.
    Shape(ShapeName),
    /// A nominal `a` (holds exactly at individual `a`).
    Nominal(NodeId),
    /// A concept name `A`.
    Concept(ConceptName),
    /// A negated shape name `¬s`.
    NotShape(ShapeName),
    /// Conjunction.
    And(Box<ShapeExpr>, Box<ShapeExpr>),
    /// Disjunction.
    Or(Box<ShapeExpr>, Box<ShapeExpr>),
    /// Universal restriction `∀r.φ`.
    Forall(Role, Box<ShapeExpr>),
    /// Existential restriction `∃r.φ`.
    Exists(Role, Box<ShapeExpr>),
}

impl ShapeExpr {
    /// `s`
    pub fn shape(s: impl Into<ShapeName>) -> Self {
        ShapeExpr::Shape(s.into())
    }

    /// `¬s`
    pub fn not_shape(s: impl Into<ShapeName>) -> Self {
        ShapeExpr::NotShape(s.into())
    }

    /// `A`
    pub fn concept(c: impl Into<ConceptName>) -> Self {
        ShapeExpr::Concept(c.into())
    }

    /// `a`
    pub fn nominal(a: impl Into<NodeId>) -> Self {
        ShapeExpr::Nominal(a.into())
    }

    /// `φ ∧ ψ`
    pub fn and(l: ShapeExpr, r: ShapeExpr) -> Self {
        ShapeExpr::And(Box::new(l), Box::new(r))
    }

    /// `φ ∨ ψ`
    pub fn or(l: ShapeExpr, r: ShapeExpr) -> Self {
        ShapeExpr::Or(Box::new(l), Box::new(r))
    }

    /// `∃r.φ`
    pub fn exists(r: Role, body: ShapeExpr) -> Self {
        ShapeExpr::Exists(r, Box::new(body))
    }

    /// `∀r.φ`
    pub fn forall(r: Role, body: ShapeExpr) -> Self {
        ShapeExpr::Forall(r, Box::new(body))
    }

    /// Parses one expression in the document text syntax.
    pub fn parse(text: &str) -> Result<Self, super::ParseError> {
        super::parse::parse_expr(text)
    }

    /// The subexpression closure: `sub(ψ) = {ψ}` for atoms, and
    /// `sub(¬s) = {¬s, s}`; compound expressions add their own node.
    pub fn sub(&self) -> BTreeSet<ShapeExpr> {
        let mut out = BTreeSet::new();
        self.collect_sub(&mut out);
        out
    }

    fn collect_sub(&self, out: &mut BTreeSet<ShapeExpr>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            ShapeExpr::Shape(_) | ShapeExpr::Nominal(_) | ShapeExpr::Concept(_) => {}
            ShapeExpr::NotShape(s) => {
                out.insert(ShapeExpr::Shape(s.clone()));
            }
            ShapeExpr::And(l, r) | ShapeExpr::Or(l, r) => {
                l.collect_sub(out);
                r.collect_sub(out);
            }
            ShapeExpr::Forall(_, b) | ShapeExpr::Exists(_, b) => b.collect_sub(out),
        }
    }

    /// Visits every node of the expression tree in pre-order.
    pub fn walk(&self, f: &mut impl FnMut(&ShapeExpr)) {
        f(self);
        match self {
            ShapeExpr::And(l, r) | ShapeExpr::Or(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            ShapeExpr::Forall(_, b) | ShapeExpr::Exists(_, b) => b.walk(f),
            _ => {}
        }
    }

    /// Shape names referenced (positively or under negation).
    pub fn shape_refs(&self) -> BTreeSet<ShapeName> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e {
            ShapeExpr::Shape(s) | ShapeExpr::NotShape(s) => {
                out.insert(s.clone());
            }
            _ => {}
        });
        out
    }

    /// Shape names referenced under negation.
    pub fn negative_refs(&self) -> BTreeSet<ShapeName> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ShapeExpr::NotShape(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Concept names mentioned.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ShapeExpr::Concept(c) = e {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Nominals mentioned.
    pub fn nominals(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ShapeExpr::Nominal(a) = e {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Roles mentioned (with their inversion flags).
    pub fn roles(&self) -> BTreeSet<Role> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e {
            ShapeExpr::Forall(r, _) | ShapeExpr::Exists(r, _) => {
                out.insert(r.clone());
            }
            _ => {}
        });
        out
    }

    /// Whether an inverse role occurs (the expression is outside ALCO).
    pub fn uses_inverse(&self) -> bool {
        self.roles().iter().any(|r| r.inverted)
    }

    /// Whether a nominal occurs (the expression is outside ALCI).
    pub fn uses_nominal(&self) -> bool {
        !self.nominals().is_empty()
    }

    /// Whether the expression is one of the seven normal-form bodies:
    /// `A`, `a`, `¬s`, `∃r.s`, `∀r.s`, `s ∧ s'`, `s ∨ s'`.
    pub fn is_normal_body(&self) -> bool {
        fn name(e: &ShapeExpr) -> bool {
            matches!(e, ShapeExpr::Shape(_))
        }
        match self {
            ShapeExpr::Concept(_) | ShapeExpr::Nominal(_) | ShapeExpr::NotShape(_) => true,
            ShapeExpr::Exists(_, b) | ShapeExpr::Forall(_, b) => name(b),
            ShapeExpr::And(l, r) | ShapeExpr::Or(l, r) => name(l) && name(r),
            ShapeExpr::Shape(_) => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ShapeExpr::Or(..) => 1,
            ShapeExpr::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            ShapeExpr::Shape(s) => write!(f, "{s}")?,
            ShapeExpr::Nominal(a) => write!(f, "<{a}>")?,
            ShapeExpr::Concept(c) => write!(f, "{c}")?,
            ShapeExpr::NotShape(s) => write!(f, "!{s}")?,
            ShapeExpr::And(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" & ")?;
                r.fmt_at(f, 3)?;
            }
            ShapeExpr::Or(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" | ")?;
                r.fmt_at(f, 2)?;
            }
            ShapeExpr::Forall(role, b) => {
                write!(f, "all {role} . ")?;
                b.fmt_at(f, 3)?;
            }
            ShapeExpr::Exists(role, b) => {
                write!(f, "some {role} . ")?;
                b.fmt_at(f, 3)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ShapeExpr {
    /// Renders in the document text syntax; the output re-parses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Debug for ShapeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}
