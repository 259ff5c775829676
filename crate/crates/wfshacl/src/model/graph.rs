//! Data graphs: finite sets of concept assertions `A(a)` and role assertions
//! `r(a,b)`, plus an indexed view used by the evaluation engines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::names::{ConceptName, NodeId, Role, RoleName};

/// A finite data graph. The domain Δ is derived: exactly the individuals that
/// occur in some assertion.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataGraph {
    concept_assertions: BTreeSet<(ConceptName, NodeId)>,
    role_assertions: BTreeSet<(RoleName, NodeId, NodeId)>,
}

impl DataGraph {
    /// The empty graph (Δ = ∅).
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `A(a)`; returns whether the assertion was new.
    pub fn add_concept(&mut self, concept: impl Into<ConceptName>, node: impl Into<NodeId>) -> bool {
        self.concept_assertions.insert((concept.into(), node.into()))
    }

    /// Adds `r(a,b)`; returns whether the assertion was new.
    pub fn add_role(&mut self, role: impl Into<RoleName>, from: impl Into<NodeId>, to: impl Into<NodeId>) -> bool {
        self.role_assertions.insert((role.into(), from.into(), to.into()))
    }

    /// Removes `A(a)` if present.
    pub fn remove_concept(&mut self, concept: &ConceptName, node: &NodeId) -> bool {
        self.concept_assertions.remove(&(concept.clone(), node.clone()))
    }

    /// Removes `r(a,b)` if present.
    pub fn remove_role(&mut self, role: &RoleName, from: &NodeId, to: &NodeId) -> bool {
        self.role_assertions.remove(&(role.clone(), from.clone(), to.clone()))
    }

    /// All concept assertions, sorted.
    pub fn concept_assertions(&self) -> &BTreeSet<(ConceptName, NodeId)> {
        &self.concept_assertions
    }

    /// All role assertions, sorted.
    pub fn role_assertions(&self) -> &BTreeSet<(RoleName, NodeId, NodeId)> {
        &self.role_assertions
    }

    /// Number of assertions.
    pub fn len(&self) -> usize {
        self.concept_assertions.len() + self.role_assertions.len()
    }

    /// Whether the graph has no assertions.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Δ: every individual mentioned by some assertion.
    pub fn domain(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for (_, a) in &self.concept_assertions {
            out.insert(a.clone());
        }
        for (_, a, b) in &self.role_assertions {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    /// Concept names used in the graph.
    pub fn concepts(&self) -> BTreeSet<ConceptName> {
        self.concept_assertions.iter().map(|(c, _)| c.clone()).collect()
    }

    /// Role names used in the graph.
    pub fn roles(&self) -> BTreeSet<RoleName> {
        self.role_assertions.iter().map(|(r, _, _)| r.clone()).collect()
    }

    /// A^G.
    pub fn concept_extension(&self, concept: &ConceptName) -> BTreeSet<NodeId> {
        self.concept_assertions.iter().filter(|(c, _)| c == concept).map(|(_, a)| a.clone()).collect()
    }

    /// r^G, honouring the inversion flag (r⁻ is the converse of r).
    pub fn role_extension(&self, role: &Role) -> BTreeSet<(NodeId, NodeId)> {
        self.role_assertions
            .iter()
            .filter(|(r, _, _)| *r == role.name)
            .map(|(_, a, b)| if role.inverted { (b.clone(), a.clone()) } else { (a.clone(), b.clone()) })
            .collect()
    }

    /// Builds the dense, index-based view used by the engines.
    pub fn index(&self) -> IndexedGraph {
        IndexedGraph::new(self)
    }

    /// Parses the line-based graph format (`A(a)`, `r(a,b)`, `#` comments).
    pub fn parse(text: &str) -> Result<Self, super::ParseError> {
        super::parse::parse_graph(text)
    }
}

impl fmt::Display for DataGraph {
    /// One assertion per line; concept assertions first, in sorted order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, a) in &self.concept_assertions {
            writeln!(f, "{c}({a})")?;
        }
        for (r, a, b) in &self.role_assertions {
            writeln!(f, "{r}({a},{b})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DataGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self
            .concept_assertions
            .iter()
            .map(|(c, a)| format!("{c}({a})"))
            .chain(self.role_assertions.iter().map(|(r, a, b)| format!("{r}({a},{b})")))
            .collect();
        write!(f, "{{{}}}", atoms.join(", "))
    }
}

/// A dense view of a [`DataGraph`]: nodes are numbered `0..n` in natural
/// order, concept extensions are bit sets and roles are adjacency lists.
#[derive(Clone, Debug)]
pub struct IndexedGraph {
    nodes: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    concepts: BTreeMap<ConceptName, FixedBitSet>,
    succ: BTreeMap<RoleName, Vec<Vec<usize>>>,
    pred: BTreeMap<RoleName, Vec<Vec<usize>>>,
}

impl IndexedGraph {
    fn new(g: &DataGraph) -> Self {
        let nodes: Vec<NodeId> = g.domain().into_iter().collect();
        let index: BTreeMap<NodeId, usize> = nodes.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let n = nodes.len();
        let mut concepts: BTreeMap<ConceptName, FixedBitSet> = BTreeMap::new();
        for (c, a) in g.concept_assertions() {
            concepts.entry(c.clone()).or_insert_with(|| FixedBitSet::with_capacity(n)).insert(index[a]);
        }
        let mut succ: BTreeMap<RoleName, Vec<Vec<usize>>> = BTreeMap::new();
        let mut pred: BTreeMap<RoleName, Vec<Vec<usize>>> = BTreeMap::new();
        for (r, a, b) in g.role_assertions() {
            let (ia, ib) = (index[a], index[b]);
            succ.entry(r.clone()).or_insert_with(|| vec![Vec::new(); n])[ia].push(ib);
            pred.entry(r.clone()).or_insert_with(|| vec![Vec::new(); n])[ib].push(ia);
        }
        IndexedGraph { nodes, index, concepts, succ, pred }
    }

    /// |Δ|.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether Δ is empty.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node at a dense index.
    pub fn node(&self, i: usize) -> &NodeId {
        &self.nodes[i]
    }

    /// All nodes in index order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Dense index of a node, if it belongs to Δ.
    pub fn index_of(&self, a: &NodeId) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// An empty node set sized for this graph.
    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    /// The full node set Δ.
    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// A^G as a bit set (empty when the concept is unused).
    pub fn concept(&self, c: &ConceptName) -> FixedBitSet {
        self.concepts.get(c).cloned().unwrap_or_else(|| self.empty_set())
    }

    /// The r-successors of node `i` (for r⁻: its r-predecessors).
    pub fn successors(&self, role: &Role, i: usize) -> &[usize] {
        let table = if role.inverted { &self.pred } else { &self.succ };
        table.get(&role.name).map(|v| v[i].as_slice()).unwrap_or(&[])
    }

    /// {a ∈ Δ | some r-successor of a is in `set`}.
    pub fn exists(&self, role: &Role, set: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for i in 0..self.len() {
            if self.successors(role, i).iter().any(|&j| set.contains(j)) {
                out.insert(i);
            }
        }
        out
    }

    /// {a ∈ Δ | every r-successor of a is in `set`}.
    pub fn forall(&self, role: &Role, set: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for i in 0..self.len() {
            if self.successors(role, i).iter().all(|&j| set.contains(j)) {
                out.insert(i);
            }
        }
        out
    }

    /// Converts a bit set back to node ids.
    pub fn to_nodes(&self, set: &FixedBitSet) -> BTreeSet<NodeId> {
        set.ones().map(|i| self.nodes[i].clone()).collect()
    }

    /// Converts node ids to a bit set, ignoring nodes outside Δ.
    pub fn from_nodes<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> FixedBitSet {
        let mut s = self.empty_set();
        for a in nodes {
            if let Some(i) = self.index_of(a) {
                s.insert(i);
            }
        }
        s
    }
}
