//! Positive boolean formulas over (direction, state) atoms.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ata::State;

/// A move of the automaton relative to the current tree node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// `-1`: the parent.
    Up,
    /// `0`: the node itself.
    Stay,
    /// `j ≥ 1`: the `j`-th child.
    Child(usize),
    /// The root child holding the `i`-th guess slot (1-based); used by the
    /// anchored variant to re-verify claims at a nominal instead of trusting them.
    Anchor(usize),
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Up => write!(f, "-1"),
            Direction::Stay => write!(f, "0"),
            Direction::Child(j) => write!(f, "{j}"),
            Direction::Anchor(i) => write!(f, "@{i}"),
        }
    }
}

/// A formula of `B([k] × Q)`: no negation constructor exists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pbf {
    /// `⊤`.
    True,
    /// `⊥`.
    False,
    /// `(d, q)`.
    Atom(Direction, State),
    /// Conjunction of at least two operands.
    And(Vec<Pbf>),
    /// Disjunction of at least two operands.
    Or(Vec<Pbf>),
}

impl Pbf {
    /// `(d, q)`.
    pub fn atom(d: Direction, q: State) -> Self {
        Pbf::Atom(d, q)
    }

    /// Conjunction with unit/zero simplification and flattening.
    pub fn and(items: impl IntoIterator<Item = Pbf>) -> Self {
        let mut out = Vec::new();
        for p in items {
            match p {
                Pbf::True => {}
                Pbf::False => return Pbf::False,
                Pbf::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Pbf::True,
            1 => out.pop().expect("one operand"),
            _ => Pbf::And(out),
        }
    }

    /// Disjunction with unit/zero simplification and flattening.
    pub fn or(items: impl IntoIterator<Item = Pbf>) -> Self {
        let mut out = Vec::new();
        for p in items {
            match p {
                Pbf::False => {}
                Pbf::True => return Pbf::True,
                Pbf::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Pbf::False,
            1 => out.pop().expect("one operand"),
            _ => Pbf::Or(out),
        }
    }

    /// `⊤` or `⊥`.
    pub fn constant(b: bool) -> Self {
        if b {
            Pbf::True
        } else {
            Pbf::False
        }
    }

    /// Whether the set of atoms `j` satisfies the formula.
    pub fn satisfied_by(&self, j: &impl Fn(&Direction, &State) -> bool) -> bool {
        match self {
            Pbf::True => true,
            Pbf::False => false,
            Pbf::Atom(d, q) => j(d, q),
            Pbf::And(xs) => xs.iter().all(|x| x.satisfied_by(j)),
            Pbf::Or(xs) => xs.iter().any(|x| x.satisfied_by(j)),
        }
    }

    /// All atoms, left to right.
    pub fn atoms(&self) -> Vec<(&Direction, &State)> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<(&'a Direction, &'a State)>) {
        match self {
            Pbf::True | Pbf::False => {}
            Pbf::Atom(d, q) => out.push((d, q)),
            Pbf::And(xs) | Pbf::Or(xs) => xs.iter().for_each(|x| x.collect(out)),
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Pbf::True => write!(f, "⊤"),
            Pbf::False => write!(f, "⊥"),
            Pbf::Atom(d, q) => write!(f, "({d},{q})"),
            Pbf::And(xs) | Pbf::Or(xs) => {
                let op = if matches!(self, Pbf::And(_)) { " ∧ " } else { " ∨ " };
                if nested {
                    write!(f, "(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    x.fmt_at(f, true)?;
                }
                if nested {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Pbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, false)
    }
}
