//! Identifier types for the four disjoint name spaces (individuals, concepts,
//! roles, shapes) and for roles with an inversion flag.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_name {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Wraps a raw token. No validation is performed here; the text
            /// parsers enforce the lexical conventions of each name space.
            pub fn new(raw: impl Into<String>) -> Self {
                $name(raw.into())
            }

            /// The underlying token.
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(raw: &str) -> Self {
                $name::new(raw)
            }
        }

        impl From<String> for $name {
            fn from(raw: String) -> Self {
                $name(raw)
            }
        }
    };
}

string_name!(
    /// An individual (graph node). Ordered "naturally": purely numeric ids
    /// compare by value and precede all other ids, which compare as strings.
    NodeId
);
string_name!(
    /// A concept (class) name such as `A`.
    ConceptName
);
string_name!(
    /// A role (property) name such as `p`.
    RoleName
);
string_name!(
    /// A shape name such as `s`.
    ShapeName
);

fn natural_cmp(a: &str, b: &str) -> Ordering {
    let na = a.parse::<u64>().ok().filter(|_| !a.starts_with('+'));
    let nb = b.parse::<u64>().ok().filter(|_| !b.starts_with('+'));
    match (na, nb) {
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! plain_order {
    ($($name:ident),*) => {$(
        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                self.0.cmp(&other.0)
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
    )*};
}

plain_order!(ConceptName, RoleName, ShapeName);

impl ConceptName {
    /// The distinguished concept ⊤. It carries no built-in extension: like
    /// every other concept it holds exactly at the nodes asserted to have it.
    pub fn top() -> Self {
        ConceptName::new("Top")
    }
}

/// A role name together with an inversion flag; `r-` denotes the converse of `r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Role {
    /// The underlying role name.
    pub name: RoleName,
    /// Whether this is the inverse `r⁻` of `name`.
    pub inverted: bool,
}

impl Role {
    /// The forward role `r`.
    pub fn forward(name: impl Into<RoleName>) -> Self {
        Role { name: name.into(), inverted: false }
    }

    /// The inverse role `r⁻`.
    pub fn inverse(name: impl Into<RoleName>) -> Self {
        Role { name: name.into(), inverted: true }
    }

    /// `invert(r) = r⁻` and `invert(r⁻) = r`.
    pub fn invert(&self) -> Self {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Role({self})")
    }
}
