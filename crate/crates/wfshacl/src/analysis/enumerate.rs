//! Exhaustive enumeration of small graphs, reduced modulo renaming of
//! anonymous nodes (named nodes stay fixed).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{ConceptName, ConstraintSet, DataGraph, Document, NodeId, RoleName};

/// Concept and role names a search may use.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// Concept names.
    pub concepts: BTreeSet<ConceptName>,
    /// Role names.
    pub roles: BTreeSet<RoleName>,
}

impl Signature {
    /// A signature from name lists.
    pub fn new<C: Into<ConceptName>, R: Into<RoleName>>(concepts: impl IntoIterator<Item = C>, roles: impl IntoIterator<Item = R>) -> Self {
        Signature { concepts: concepts.into_iter().map(Into::into).collect(), roles: roles.into_iter().map(Into::into).collect() }
    }

    /// Names used by a constraint set.
    pub fn of_constraints(c: &ConstraintSet) -> Self {
        Signature { concepts: c.concepts(), roles: c.role_names() }
    }

    /// Names used by a document (bodies and targets).
    pub fn of_document(d: &Document) -> Self {
        Signature { concepts: d.concepts(), roles: d.role_names() }
    }

    /// The union of two signatures.
    pub fn union(&self, other: &Signature) -> Self {
        Signature {
            concepts: self.concepts.union(&other.concepts).cloned().collect(),
            roles: self.roles.union(&other.roles).cloned().collect(),
        }
    }

    /// A concept name `Aux`, `Aux1`, … not in the signature.
    pub fn fresh_concept(&self) -> ConceptName {
        std::iter::once("Aux".to_string())
            .chain((1..).map(|i| format!("Aux{i}")))
            .map(ConceptName::new)
            .find(|c| !self.concepts.contains(c))
            .expect("infinitely many candidates")
    }

    /// Number of assertion slots over `n` nodes.
    pub fn slots(&self, n: usize) -> usize {
        self.concepts.len() * n + self.roles.len() * n * n
    }
}

/// How nodes without assertions are treated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Padding {
    /// Every node must occur in an assertion.
    Strict,
    /// Named nodes, and at most one anonymous node, may lack assertions; such
    /// nodes are materialised with the given concept.
    Pad(ConceptName),
}

#[derive(Clone, Debug)]
enum Slot {
    Concept(usize, usize),
    Role(usize, usize, usize),
}

struct Level {
    nodes: Vec<NodeId>,
    named: usize,
    slots: Vec<Slot>,
    slot_nodes: Vec<u64>,
    perms: Vec<Vec<usize>>,
    mask: u64,
    end: u64,
}

/// A deterministic stream of graphs: by node count, then by assertion mask.
pub struct GraphStream {
    signature: Signature,
    concepts: Vec<ConceptName>,
    roles: Vec<RoleName>,
    required: Vec<NodeId>,
    max_nodes: usize,
    padding: Padding,
    next_size: usize,
    level: Option<Level>,
}

/// The largest number of assertion slots a stream will enumerate.
pub const MAX_SLOTS: usize = 62;

/// All graphs over `signature` whose domain contains `required` and has at most
/// `max_nodes` nodes, one per isomorphism class modulo the required nodes.
/// Anonymous nodes are named `0`, `1`, … (skipping required names).
///
/// # Panics
/// If a size level needs more than [`MAX_SLOTS`] assertion slots.
pub fn enumerate_graphs(signature: &Signature, required: &BTreeSet<NodeId>, max_nodes: usize) -> GraphStream {
    GraphStream::new(signature, required, max_nodes, Padding::Strict)
}

impl GraphStream {
    /// A stream with the given padding policy.
    pub fn new(signature: &Signature, required: &BTreeSet<NodeId>, max_nodes: usize, padding: Padding) -> Self {
        GraphStream {
            signature: signature.clone(),
            concepts: signature.concepts.iter().cloned().collect(),
            roles: signature.roles.iter().cloned().collect(),
            required: required.iter().cloned().collect(),
            max_nodes,
            padding,
            next_size: required.len(),
            level: None,
        }
    }

    /// The node count of the level being enumerated.
    pub fn current_size(&self) -> Option<usize> {
        self.level.as_ref().map(|l| l.nodes.len())
    }

    fn open_level(&self, n: usize) -> Level {
        let named = self.required.len();
        let mut nodes = self.required.clone();
        let mut k = 0usize;
        while nodes.len() < n {
            let cand = NodeId::new(k.to_string());
            if !self.required.contains(&cand) {
                nodes.push(cand);
            }
            k += 1;
        }
        let mut slots = Vec::new();
        for c in 0..self.concepts.len() {
            for i in 0..n {
                slots.push(Slot::Concept(c, i));
            }
        }
        for r in 0..self.roles.len() {
            for i in 0..n {
                for j in 0..n {
                    slots.push(Slot::Role(r, i, j));
                }
            }
        }
        assert!(slots.len() <= MAX_SLOTS, "{} assertion slots exceed the enumeration limit", slots.len());
        let slot_nodes = slots
            .iter()
            .map(|s| match s {
                Slot::Concept(_, i) => 1u64 << i,
                Slot::Role(_, i, j) => (1u64 << i) | (1u64 << j),
            })
            .collect();
        let perms = permutations(n - named)
            .into_iter()
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .map(|p| {
                let node_map: Vec<usize> = (0..n).map(|i| if i < named { i } else { named + p[i - named] }).collect();
                slots
                    .iter()
                    .map(|s| match *s {
                        Slot::Concept(c, i) => c * n + node_map[i],
                        Slot::Role(r, i, j) => self.concepts.len() * n + r * n * n + node_map[i] * n + node_map[j],
                    })
                    .collect()
            })
            .collect();
        Level { nodes, named, end: 1u64 << slots.len(), slots, slot_nodes, perms, mask: 0 }
    }

    fn accept(&self, l: &Level, mask: u64) -> bool {
        let n = l.nodes.len();
        let mut used = 0u64;
        let mut m = mask;
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            used |= l.slot_nodes[k];
            m &= m - 1;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let unused = all & !used;
        let ok = match self.padding {
            Padding::Strict => unused == 0,
            Padding::Pad(_) => (unused >> l.named).count_ones() <= 1,
        };
        ok && l.perms.iter().all(|p| permute(mask, p) >= mask)
    }

    fn build(&self, l: &Level, mask: u64) -> DataGraph {
        let mut g = DataGraph::new();
        for (k, s) in l.slots.iter().enumerate() {
            if mask >> k & 1 == 0 {
                continue;
            }
            match *s {
                Slot::Concept(c, i) => {
                    g.add_concept(self.concepts[c].clone(), l.nodes[i].clone());
                }
                Slot::Role(r, i, j) => {
                    g.add_role(self.roles[r].clone(), l.nodes[i].clone(), l.nodes[j].clone());
                }
            }
        }
        if let Padding::Pad(aux) = &self.padding {
            let dom = g.domain();
            for a in &l.nodes {
                if !dom.contains(a) {
                    g.add_concept(aux.clone(), a.clone());
                }
            }
        }
        g
    }

    /// The signature being enumerated.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }
}

impl Iterator for GraphStream {
    type Item = DataGraph;

    fn next(&mut self) -> Option<DataGraph> {
        loop {
            if self.level.is_none() {
                if self.next_size > self.max_nodes {
                    return None;
                }
                self.level = Some(self.open_level(self.next_size));
                self.next_size += 1;
            }
            let l = self.level.take().expect("level is open");
            let mut l = l;
            while l.mask < l.end {
                let m = l.mask;
                l.mask += 1;
                if self.accept(&l, m) {
                    let g = self.build(&l, m);
                    self.level = Some(l);
                    return Some(g);
                }
            }
        }
    }
}

fn permute(mask: u64, p: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        out |= 1u64 << p[k];
        m &= m - 1;
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    heap(k, &mut cur, &mut out);
    out
}

fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, cur, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        if i + 1 < k {
            cur.swap(j, k - 1);
        }
    }
}
