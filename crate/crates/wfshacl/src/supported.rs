//! Supported-model semantics by exhaustive enumeration, and stratification.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ConstraintSet, DataGraph, ShapeName};
use crate::wf::{Dense, Engine, Polarity, ShapeAssignment};

/// Default limit on `|defined shapes| × |Δ|` for enumeration.
pub const DEFAULT_BIT_BUDGET: usize = 20;

/// Errors of the supported-model engine.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SupportedError {
    /// The assignment space is larger than the configured budget.
    #[error("supported-model enumeration needs {bits} bits, budget is {budget}")]
    BudgetExceeded {
        /// `|defined shapes| × |Δ|`.
        bits: usize,
        /// The configured maximum.
        budget: usize,
    },
}

/// Whether the total assignment `s` satisfies `{a | x(a) ∈ S} = ⌊φ⌋` for every `x ← φ`.
/// Assignments that are not total over defined shapes × Δ are rejected.
pub fn is_supported_model(g: &DataGraph, c: &ConstraintSet, s: &ShapeAssignment) -> bool {
    if !s.is_consistent() || !s.is_total(c.heads(), &g.domain()) {
        return false;
    }
    let e = Engine::new(g, c);
    let d = e.to_dense(s);
    is_fixed_point(&e, c, &d)
}

fn is_fixed_point(e: &Engine<'_>, c: &ConstraintSet, d: &Dense) -> bool {
    c.iter().enumerate().all(|(i, (_, body))| e.eval(body, &d.pos, &d.neg, Polarity::Lower) == d.pos[i])
}

/// All supported models, in canonical order, with the default budget.
pub fn enumerate_supported_models(g: &DataGraph, c: &ConstraintSet) -> Result<Vec<ShapeAssignment>, SupportedError> {
    enumerate_supported_models_with_budget(g, c, DEFAULT_BIT_BUDGET)
}

/// All supported models. The canonical order is lexicographic over the bit
/// vector indexed by (shape, node) pairs in sorted order, with negated atoms as 0.
pub fn enumerate_supported_models_with_budget(
    g: &DataGraph,
    c: &ConstraintSet,
    budget: usize,
) -> Result<Vec<ShapeAssignment>, SupportedError> {
    let e = Engine::new(g, c);
    let n = e.ig.len();
    let bits = e.shapes.len() * n;
    if bits > budget || bits >= 64 {
        return Err(SupportedError::BudgetExceeded { bits, budget });
    }
    let mut out = Vec::new();
    for mask in 0..(1u64 << bits) {
        let mut d = e.empty();
        for k in 0..bits {
            // Position 0 is the most significant bit.
            let on = mask >> (bits - 1 - k) & 1 == 1;
            let (si, ni) = (k / n, k % n);
            if on {
                d.pos[si].insert(ni);
            } else {
                d.neg[si].insert(ni);
            }
        }
        if is_fixed_point(&e, c, &d) {
            out.push(e.decode(&d));
        }
    }
    Ok(out)
}

/// A partition of a constraint set into layers `C₀, …, C_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratification {
    /// The layers, lowest first.
    pub layers: Vec<ConstraintSet>,
}

impl Stratification {
    /// The layer index defining `s`.
    pub fn layer_of(&self, s: &ShapeName) -> Option<usize> {
        self.layers.iter().position(|l| l.defines(s))
    }

    /// Checks both stratification conditions against the definitions in the layers:
    /// positive references are defined at or below, negative ones strictly below.
    pub fn is_valid(&self) -> bool {
        self.layers.iter().enumerate().all(|(i, layer)| {
            layer.iter().all(|(_, body)| {
                let neg = body.negative_refs();
                body.shape_refs().iter().all(|x| match self.layer_of(x) {
                    Some(j) if neg.contains(x) => j < i,
                    Some(j) => j <= i,
                    None => false,
                })
            })
        })
    }
}

/// A stratification of `c` if one exists: layers are longest paths in the
/// dependency graph counting negative edges; none exists iff some negative
/// edge lies on a cycle.
pub fn stratify(c: &ConstraintSet) -> Option<Stratification> {
    let heads: Vec<ShapeName> = c.heads().cloned().collect();
    let idx: BTreeMap<&ShapeName, usize> = heads.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut dg: DiGraph<(), bool> = DiGraph::new();
    let nodes: Vec<_> = heads.iter().map(|_| dg.add_node(())).collect();
    for (s, body) in c.iter() {
        let neg = body.negative_refs();
        for x in body.shape_refs() {
            if let Some(&j) = idx.get(&x) {
                dg.add_edge(nodes[idx[s]], nodes[j], neg.contains(&x));
            }
        }
    }
    // tarjan_scc yields components in reverse topological order: dependencies first.
    let sccs = tarjan_scc(&dg);
    let mut comp = vec![0usize; heads.len()];
    for (k, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = k;
        }
    }
    let mut level = vec![0usize; sccs.len()];
    for (k, scc) in sccs.iter().enumerate() {
        let mut lv = 0;
        for n in scc {
            for e in dg.edges(*n) {
                use petgraph::visit::EdgeRef;
                let target_comp = comp[e.target().index()];
                let negative = *e.weight();
                if target_comp == k {
                    if negative {
                        return None;
                    }
                } else {
                    lv = lv.max(level[target_comp] + usize::from(negative));
                }
            }
        }
        level[k] = lv;
    }
    let depth = level.iter().copied().max().map_or(0, |m| m + 1);
    let mut layers = vec![ConstraintSet::new(); depth];
    for (i, s) in heads.iter().enumerate() {
        let body = c.get(s).expect("head is defined").clone();
        layers[level[comp[i]]].define(s.clone(), body).expect("heads are unique");
    }
    Some(Stratification { layers })
}

/// Whether `c` admits a stratification.
pub fn is_stratified(c: &ConstraintSet) -> bool {
    stratify(c).is_some()
}

/// The canonical bit key of a total assignment (used to order models).
pub fn canonical_key(c: &ConstraintSet, g: &DataGraph, s: &ShapeAssignment) -> Vec<bool> {
    let nodes: BTreeSet<_> = g.domain();
    c.heads().flat_map(|x| nodes.iter().map(move |a| s.holds(x, a))).collect()
}
