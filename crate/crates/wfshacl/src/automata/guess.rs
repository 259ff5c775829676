//! Guesses: the assumed types of the nominals, how nominals are identified
//! with root slots, and which role edges hold between nominals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{NodeId, Role, RoleName, ShapeExpr};

use super::AutomataError;

/// Most guesses a single enumeration may produce.
pub const MAX_GUESSES: u128 = 1 << 20;

/// A guess `G = ({γ₁,…,γ_l}, f, C)` over nominals `a₁ … a_l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guess {
    /// The nominals `a₁ … a_l`, sorted.
    pub nominals: Vec<NodeId>,
    /// `γ₁ … γ_l`; `None` is `⊥`.
    pub slots: Vec<Option<BTreeSet<ShapeExpr>>>,
    /// `f(i)` (1-based) for each nominal `a_i`.
    pub mapping: Vec<usize>,
    /// Role edges `(a, r, a')` between nominals, closed under inversion.
    pub connections: BTreeSet<(NodeId, Role, NodeId)>,
}

impl Guess {
    /// The unique guess when there are no nominals.
    pub fn empty() -> Self {
        Guess { nominals: Vec::new(), slots: Vec::new(), mapping: Vec::new(), connections: BTreeSet::new() }
    }

    /// `l`.
    pub fn len(&self) -> usize {
        self.nominals.len()
    }

    /// Whether there are no nominals.
    pub fn is_empty(&self) -> bool {
        self.nominals.is_empty()
    }

    /// `γ_i` (1-based); `None` is `⊥`.
    pub fn slot(&self, i: usize) -> Option<&BTreeSet<ShapeExpr>> {
        self.slots.get(i.checked_sub(1)?)?.as_ref()
    }

    /// `f(i)` for a nominal name.
    pub fn slot_of(&self, a: &NodeId) -> Option<usize> {
        self.nominals.iter().position(|b| b == a).map(|i| self.mapping[i])
    }

    /// `γ_{f(i)}` for a nominal name.
    pub fn type_of(&self, a: &NodeId) -> Option<&BTreeSet<ShapeExpr>> {
        self.slot(self.slot_of(a)?)
    }

    /// The structural invariants: `a_i ∈ γ_{f(i)}` and in no other slot, slots
    /// without a nominal are `⊥`, and the connections are inversion-closed
    /// edges between nominals.
    pub fn check_invariants(&self) -> bool {
        let l = self.nominals.len();
        if self.slots.len() != l || self.mapping.len() != l || self.mapping.iter().any(|&j| j == 0 || j > l) {
            return false;
        }
        for (i, a) in self.nominals.iter().enumerate() {
            let item = ShapeExpr::Nominal(a.clone());
            for (j, slot) in self.slots.iter().enumerate() {
                let holds = slot.as_ref().is_some_and(|g| g.contains(&item));
                if holds != (self.mapping[i] == j + 1) {
                    return false;
                }
            }
        }
        for slot in self.slots.iter().flatten() {
            if !slot.iter().any(|e| matches!(e, ShapeExpr::Nominal(_))) {
                return false;
            }
            let foreign = slot.iter().any(|e| matches!(e, ShapeExpr::Nominal(a) if !self.nominals.contains(a)));
            if foreign {
                return false;
            }
        }
        self.connections.iter().all(|(a, r, b)| {
            self.nominals.contains(a) && self.nominals.contains(b) && self.connections.contains(&(b.clone(), r.invert(), a.clone()))
        })
    }
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, slot) in self.slots.iter().enumerate() {
            match slot {
                None => writeln!(f, "γ{} = ⊥", i + 1)?,
                Some(g) => {
                    let items: Vec<String> = g.iter().map(ToString::to_string).collect();
                    writeln!(f, "γ{} = {{{}}}", i + 1, items.join(", "))?;
                }
            }
        }
        for (i, a) in self.nominals.iter().enumerate() {
            writeln!(f, "f({a}) = {}", self.mapping[i])?;
        }
        let conns: Vec<String> = self.connections.iter().map(|(a, r, b)| format!("({a}, {r}, {b})")).collect();
        writeln!(f, "connections = {{{}}}", conns.join(", "))
    }
}

/// All guesses over a universe of type items, in a fixed order: by mapping,
/// then by slot contents, then by connections. The first guess for each
/// mapping has minimal slots and no connections.
#[derive(Clone, Debug)]
pub struct Guesses {
    nominals: Vec<NodeId>,
    items: Vec<ShapeExpr>,
    orbits: Vec<(NodeId, RoleName, NodeId)>,
    mapping: Vec<usize>,
    masks: Vec<u64>,
    conn: u64,
    done: bool,
}

impl Guesses {
    /// Guesses for `nominals` whose slots range over `universe` (nominals in
    /// the universe are placed by the mapping, never chosen freely) and whose
    /// connections use `roles`.
    pub fn new(universe: &BTreeSet<ShapeExpr>, nominals: &BTreeSet<NodeId>, roles: &BTreeSet<RoleName>) -> Result<Self, AutomataError> {
        let nominals: Vec<NodeId> = nominals.iter().cloned().collect();
        let items: Vec<ShapeExpr> = universe.iter().filter(|e| !matches!(e, ShapeExpr::Nominal(_))).cloned().collect();
        let mut orbits = Vec::new();
        for a in &nominals {
            for b in &nominals {
                for r in roles {
                    orbits.push((a.clone(), r.clone(), b.clone()));
                }
            }
        }
        let it = Guesses { nominals, items, orbits, mapping: Vec::new(), masks: Vec::new(), conn: 0, done: false };
        let count = it.count_total();
        if count.is_none_or(|c| c > MAX_GUESSES) {
            return Err(AutomataError::TooManyGuesses);
        }
        let l = it.nominals.len();
        let mut it = it;
        it.mapping = vec![1; l];
        it.reset_masks();
        Ok(it)
    }

    /// The total number of guesses, if it fits in `u128`.
    pub fn count_total(&self) -> Option<u128> {
        let l = self.nominals.len() as u32;
        let conns = 1u128.checked_shl(self.orbits.len() as u32)?;
        if l == 0 {
            return Some(1);
        }
        // Σ over mappings of 2^(|items| · |image|) · 2^orbits
        let per_slot = 1u128.checked_shl(self.items.len() as u32)?;
        let mut total: u128 = 0;
        let mut mapping = vec![1usize; l as usize];
        loop {
            let image: BTreeSet<usize> = mapping.iter().copied().collect();
            total = total.checked_add(per_slot.checked_pow(image.len() as u32)?.checked_mul(conns)?)?;
            if !next_mapping(&mut mapping, l as usize) {
                return Some(total);
            }
        }
    }

    fn image(&self) -> Vec<usize> {
        self.mapping.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    fn reset_masks(&mut self) {
        self.masks = vec![0; self.image().len()];
        self.conn = 0;
    }

    fn current(&self) -> Guess {
        let l = self.nominals.len();
        let image = self.image();
        let mut slots: Vec<Option<BTreeSet<ShapeExpr>>> = vec![None; l];
        for (k, &j) in image.iter().enumerate() {
            let mut g: BTreeSet<ShapeExpr> =
                self.items.iter().enumerate().filter(|(b, _)| self.masks[k] >> b & 1 == 1).map(|(_, e)| e.clone()).collect();
            for (i, a) in self.nominals.iter().enumerate() {
                if self.mapping[i] == j {
                    g.insert(ShapeExpr::Nominal(a.clone()));
                }
            }
            slots[j - 1] = Some(g);
        }
        let mut connections = BTreeSet::new();
        for (b, (a, r, c)) in self.orbits.iter().enumerate() {
            if self.conn >> b & 1 == 1 {
                connections.insert((a.clone(), Role::forward(r.clone()), c.clone()));
                connections.insert((c.clone(), Role::inverse(r.clone()), a.clone()));
            }
        }
        Guess { nominals: self.nominals.clone(), slots, mapping: self.mapping.clone(), connections }
    }

    fn advance(&mut self) {
        if (self.conn + 1) >> self.orbits.len() == 0 {
            self.conn += 1;
            return;
        }
        self.conn = 0;
        let width = self.items.len();
        for m in self.masks.iter_mut() {
            if (*m + 1) >> width == 0 {
                *m += 1;
                return;
            }
            *m = 0;
        }
        let l = self.nominals.len();
        if l == 0 || !next_mapping(&mut self.mapping, l) {
            self.done = true;
        } else {
            self.reset_masks();
        }
    }
}

fn next_mapping(mapping: &mut [usize], l: usize) -> bool {
    for x in mapping.iter_mut().rev() {
        if *x < l {
            *x += 1;
            return true;
        }
        *x = 1;
    }
    false
}

impl Iterator for Guesses {
    type Item = Guess;

    fn next(&mut self) -> Option<Guess> {
        if self.done {
            return None;
        }
        let g = self.current();
        self.advance();
        Some(g)
    }
}
