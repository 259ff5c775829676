//! Constraint sets, targets and documents, with normalisation, restriction to
//! the closure of a shape name and graph compatibility.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::ShapeExpr;
use super::graph::DataGraph;
use super::names::{ConceptName, NodeId, Role, RoleName, ShapeName};
use super::ModelError;

/// A set of shape constraints `s ← φ`, at most one per head.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintSet {
    defs: BTreeMap<ShapeName, ShapeExpr>,
}

impl ConstraintSet {
    /// The empty constraint set.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from `(head, body)` pairs, rejecting duplicate heads.
    pub fn from_defs(defs: impl IntoIterator<Item = (ShapeName, ShapeExpr)>) -> Result<Self, ModelError> {
        let mut c = ConstraintSet::new();
        for (s, e) in defs {
            c.define(s, e)?;
        }
        Ok(c)
    }

    /// Adds `s ← φ`; fails if `s` already heads a constraint.
    pub fn define(&mut self, head: impl Into<ShapeName>, body: ShapeExpr) -> Result<(), ModelError> {
        let head = head.into();
        if self.defs.contains_key(&head) {
            return Err(ModelError::DuplicateHead(head));
        }
        self.defs.insert(head, body);
        Ok(())
    }

    /// C(s): the body of the unique constraint with head `s`.
    pub fn get(&self, s: &ShapeName) -> Option<&ShapeExpr> {
        self.defs.get(s)
    }

    /// C(s), or `UndefinedShape`.
    pub fn body(&self, s: &ShapeName) -> Result<&ShapeExpr, ModelError> {
        self.defs.get(s).ok_or_else(|| ModelError::UndefinedShape(s.clone()))
    }

    /// Whether `s` heads some constraint.
    pub fn defines(&self, s: &ShapeName) -> bool {
        self.defs.contains_key(s)
    }

    /// The constraints in head order.
    pub fn iter(&self) -> impl Iterator<Item = (&ShapeName, &ShapeExpr)> {
        self.defs.iter()
    }

    /// Defined shape names, sorted.
    pub fn heads(&self) -> impl Iterator<Item = &ShapeName> {
        self.defs.keys()
    }

    /// Number of constraints.
    pub fn len(&self) -> usize {
        self.defs.len()
    }

    /// Whether there are no constraints.
    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// `sub(C)`: the union of the subexpression closures of all bodies.
    pub fn sub(&self) -> BTreeSet<ShapeExpr> {
        let mut out = BTreeSet::new();
        for body in self.defs.values() {
            out.extend(body.sub());
        }
        out
    }

    /// Concept names used in bodies.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        self.defs.values().flat_map(ShapeExpr::concepts).collect()
    }

    /// Nominals used in bodies.
    pub fn nominals(&self) -> BTreeSet<NodeId> {
        self.defs.values().flat_map(ShapeExpr::nominals).collect()
    }

    /// Roles used in bodies (with inversion flags).
    pub fn roles(&self) -> BTreeSet<Role> {
        self.defs.values().flat_map(ShapeExpr::roles).collect()
    }

    /// Role names used in bodies.
    pub fn role_names(&self) -> BTreeSet<RoleName> {
        self.roles().into_iter().map(|r| r.name).collect()
    }

    /// Every shape name referenced in a body.
    pub fn referenced_shapes(&self) -> BTreeSet<ShapeName> {
        self.defs.values().flat_map(ShapeExpr::shape_refs).collect()
    }

    /// Fails with `UndefinedShape` if some body mentions an undefined shape.
    pub fn check_defined(&self) -> Result<(), ModelError> {
        match self.referenced_shapes().into_iter().find(|s| !self.defines(s)) {
            Some(s) => Err(ModelError::UndefinedShape(s)),
            None => Ok(()),
        }
    }

    /// Whether every constraint is in one of the seven normal forms.
    pub fn is_normal(&self) -> bool {
        self.defs.values().all(ShapeExpr::is_normal_body)
    }

    /// Rewrites every constraint into normal form. Nested subexpressions are
    /// lifted into fresh shapes named `<head>#<n>` (counter per head, skipping
    /// names already in use); a plain reference `s ← s'` becomes `s ← s' ∨ s'`.
    /// Bodies that are already normal are left untouched, so normalisation is
    /// idempotent.
    pub fn normalize(&self) -> Result<ConstraintSet, ModelError> {
        self.check_defined()?;
        let mut used: BTreeSet<ShapeName> = self.defs.keys().cloned().collect();
        used.extend(self.referenced_shapes());
        let mut out = ConstraintSet::new();
        for (head, body) in &self.defs {
            let mut namer = FreshNamer { head: head.clone(), counter: 0 };
            normalize_def(head.clone(), body.clone(), &mut namer, &mut used, &mut out)?;
        }
        Ok(out)
    }

    /// `cl_C(s)`: the smallest set of shape names containing `s` and closed under
    /// "`s'` in the closure and `s''` occurs in `sub(C(s'))`".
    pub fn closure(&self, s: &ShapeName) -> Result<BTreeSet<ShapeName>, ModelError> {
        self.body(s)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![s.clone()];
        while let Some(x) = stack.pop() {
            if !seen.insert(x.clone()) {
                continue;
            }
            if let Some(body) = self.defs.get(&x) {
                for y in body.shape_refs() {
                    if !seen.contains(&y) {
                        stack.push(y);
                    }
                }
            }
        }
        Ok(seen)
    }

    /// `C_s`: the constraints whose heads lie in the closure of `s`.
    pub fn restrict_to(&self, s: &ShapeName) -> Result<ConstraintSet, ModelError> {
        let cl = self.closure(s)?;
        Ok(ConstraintSet { defs: self.defs.iter().filter(|(h, _)| cl.contains(*h)).map(|(h, b)| (h.clone(), b.clone())).collect() })
    }

    /// Restriction to the union of closures of several shape names.
    pub fn restrict_to_all<'a>(&self, shapes: impl IntoIterator<Item = &'a ShapeName>) -> Result<ConstraintSet, ModelError> {
        let mut cl = BTreeSet::new();
        for s in shapes {
            cl.extend(self.closure(s)?);
        }
        Ok(ConstraintSet { defs: self.defs.iter().filter(|(h, _)| cl.contains(*h)).map(|(h, b)| (h.clone(), b.clone())).collect() })
    }

    /// Parses the constraint lines of a document (targets are rejected).
    pub fn parse(text: &str) -> Result<Self, super::ParseError> {
        let doc = Document::parse(text)?;
        if !doc.targets.is_empty() {
            return Err(super::ParseError::new(1, 1, "constraint set must not contain targets"));
        }
        Ok(doc.constraints)
    }
}

struct FreshNamer {
    head: ShapeName,
    counter: usize,
}

impl FreshNamer {
    fn fresh(&mut self, used: &mut BTreeSet<ShapeName>) -> ShapeName {
        loop {
            self.counter += 1;
            let candidate = ShapeName::new(format!("{}#{}", self.head, self.counter));
            if used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

fn normalize_def(
    head: ShapeName,
    body: ShapeExpr,
    namer: &mut FreshNamer,
    used: &mut BTreeSet<ShapeName>,
    out: &mut ConstraintSet,
) -> Result<(), ModelError> {
    if body.is_normal_body() {
        return out.define(head, body);
    }
    // Children that are not plain names are named first (left to right), then
    // the lifted definitions are normalised in the same order.
    let mut pending: Vec<(ShapeName, ShapeExpr)> = Vec::new();
    let mut lift = |e: ShapeExpr, pending: &mut Vec<(ShapeName, ShapeExpr)>, used: &mut BTreeSet<ShapeName>| -> ShapeExpr {
        match e {
            ShapeExpr::Shape(_) => e,
            other => {
                let name = namer.fresh(used);
                pending.push((name.clone(), other));
                ShapeExpr::Shape(name)
            }
        }
    };
    let normal = match body {
        ShapeExpr::Shape(s) => ShapeExpr::or(ShapeExpr::Shape(s.clone()), ShapeExpr::Shape(s)),
        ShapeExpr::And(l, r) => {
            let l = lift(*l, &mut pending, used);
            let r = lift(*r, &mut pending, used);
            ShapeExpr::and(l, r)
        }
        ShapeExpr::Or(l, r) => {
            let l = lift(*l, &mut pending, used);
            let r = lift(*r, &mut pending, used);
            ShapeExpr::or(l, r)
        }
        ShapeExpr::Exists(role, b) => ShapeExpr::exists(role, lift(*b, &mut pending, used)),
        ShapeExpr::Forall(role, b) => ShapeExpr::forall(role, lift(*b, &mut pending, used)),
        atom => atom,
    };
    out.define(head, normal)?;
    for (name, e) in pending {
        normalize_def(name, e, namer, used, out)?;
    }
    Ok(())
}

impl fmt::Display for ConstraintSet {
    /// One `s <- EXPR` line per constraint, in head order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, e) in &self.defs {
            writeln!(f, "{s} <- {e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.defs.iter().map(|(s, e)| format!("{s} <- {e}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// What a target selects: one node, every member of a class, or every subject
/// of a role (for `r⁻`, every subject of the converse relation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TargetSubject {
    /// A single individual.
    Node(NodeId),
    /// All members of a concept.
    Class(ConceptName),
    /// All `a` with `(a, a') ∈ r^G`.
    Role(Role),
}

/// A target `(ℓ, s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Target {
    /// The selected node(s).
    pub subject: TargetSubject,
    /// The shape they must validate.
    pub shape: ShapeName,
}

impl Target {
    /// `(a, s)`
    pub fn node(a: impl Into<NodeId>, s: impl Into<ShapeName>) -> Self {
        Target { subject: TargetSubject::Node(a.into()), shape: s.into() }
    }

    /// `(A, s)`
    pub fn class(c: impl Into<ConceptName>, s: impl Into<ShapeName>) -> Self {
        Target { subject: TargetSubject::Class(c.into()), shape: s.into() }
    }

    /// `(r, s)`
    pub fn role(r: Role, s: impl Into<ShapeName>) -> Self {
        Target { subject: TargetSubject::Role(r), shape: s.into() }
    }

    /// The nodes of `g` that this target selects.
    pub fn selected_nodes(&self, g: &DataGraph) -> BTreeSet<NodeId> {
        match &self.subject {
            TargetSubject::Node(a) => std::iter::once(a.clone()).collect(),
            TargetSubject::Class(c) => g.concept_extension(c),
            TargetSubject::Role(r) => g.role_extension(r).into_iter().map(|(a, _)| a).collect(),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.subject {
            TargetSubject::Node(a) => write!(f, "target node <{a}> {}", self.shape),
            TargetSubject::Class(c) => write!(f, "target class {c} {}", self.shape),
            TargetSubject::Role(r) => write!(f, "target role {r} {}", self.shape),
        }
    }
}

/// A SHACL document: constraints plus targets.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Document {
    /// The constraint set.
    pub constraints: ConstraintSet,
    /// The targets, in source order.
    pub targets: Vec<Target>,
}

impl Document {
    /// Builds a document, checking that every referenced shape is defined.
    pub fn new(constraints: ConstraintSet, targets: Vec<Target>) -> Result<Self, ModelError> {
        let d = Document { constraints, targets };
        d.check_well_formed()?;
        Ok(d)
    }

    /// The empty document `(∅, ∅)`.
    pub fn empty() -> Self {
        Document::default()
    }

    /// Every shape referenced by a body or a target must be defined.
    pub fn check_well_formed(&self) -> Result<(), ModelError> {
        self.constraints.check_defined()?;
        match self.targets.iter().find(|t| !self.constraints.defines(&t.shape)) {
            Some(t) => Err(ModelError::UndefinedShape(t.shape.clone())),
            None => Ok(()),
        }
    }

    /// Individuals mentioned by targets or nominal expressions.
    pub fn individuals(&self) -> BTreeSet<NodeId> {
        let mut out = self.constraints.nominals();
        for t in &self.targets {
            if let TargetSubject::Node(a) = &t.subject {
                out.insert(a.clone());
            }
        }
        out
    }

    /// Concept names mentioned by bodies or class targets.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        let mut out = self.constraints.concepts();
        for t in &self.targets {
            if let TargetSubject::Class(c) = &t.subject {
                out.insert(c.clone());
            }
        }
        out
    }

    /// Role names mentioned by bodies or role targets.
    pub fn role_names(&self) -> BTreeSet<RoleName> {
        let mut out = self.constraints.role_names();
        for t in &self.targets {
            if let TargetSubject::Role(r) = &t.subject {
                out.insert(r.name.clone());
            }
        }
        out
    }

    /// Shape names used as targets.
    pub fn target_shapes(&self) -> BTreeSet<ShapeName> {
        self.targets.iter().map(|t| t.shape.clone()).collect()
    }

    /// The same document with a normalised constraint set.
    pub fn normalize(&self) -> Result<Document, ModelError> {
        Ok(Document { constraints: self.constraints.normalize()?, targets: self.targets.clone() })
    }

    /// Parses the document text format.
    pub fn parse(text: &str) -> Result<Self, super::ParseError> {
        super::parse::parse_document(text)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraints)?;
        for t in &self.targets {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.constraints, self.targets.iter().map(ToString::to_string).collect::<Vec<_>>())
    }
}

/// True iff every individual mentioned in `d` (targets or nominals) is in Δ of `g`.
pub fn check_compatible(g: &DataGraph, d: &Document) -> bool {
    let dom = g.domain();
    d.individuals().iter().all(|a| dom.contains(a))
}
