//! Symbolic evaluation of closed formulas over every graph with a fixed node
//! set at once: each node's truth value becomes an and-inverter circuit over
//! the graph's assertion variables, and a SAT solver searches for a graph.

use std::collections::{BTreeMap, HashMap};

use crate::model::{ConceptName, DataGraph, NodeId, Role, RoleName};
use crate::mu::{MuFormula, Var};

use super::aig::{self, Aig, Edge};

/// All graphs over a fixed node list and signature, as circuit inputs.
pub struct SymbolicGraph {
    /// The circuit.
    pub aig: Aig,
    nodes: Vec<NodeId>,
    concepts: BTreeMap<ConceptName, Vec<Edge>>,
    roles: BTreeMap<RoleName, Vec<Vec<Edge>>>,
    memo: HashMap<(*const MuFormula, Vec<Vec<Edge>>), Vec<Edge>>,
}

impl SymbolicGraph {
    /// Fresh inputs for `A(i)` and `r(i,j)` over the given nodes.
    pub fn new<'a>(
        nodes: Vec<NodeId>,
        concepts: impl IntoIterator<Item = &'a ConceptName>,
        roles: impl IntoIterator<Item = &'a RoleName>,
    ) -> Self {
        let mut aig = Aig::new();
        let n = nodes.len();
        let concepts = concepts.into_iter().map(|c| (c.clone(), (0..n).map(|_| aig.input()).collect())).collect();
        let roles = roles.into_iter().map(|r| (r.clone(), (0..n).map(|_| (0..n).map(|_| aig.input()).collect()).collect())).collect();
        SymbolicGraph { aig, nodes, concepts, roles, memo: HashMap::new() }
    }

    /// The node list.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    fn edge(&self, role: &Role, i: usize, j: usize) -> Edge {
        match self.roles.get(&role.name) {
            Some(m) if role.inverted => m[j][i],
            Some(m) => m[i][j],
            None => Edge::FALSE,
        }
    }

    /// The circuit vector `‖Φ‖` (one edge per node). `Φ` must be closed.
    pub fn eval(&mut self, phi: &MuFormula) -> Vec<Edge> {
        let mut env = Vec::new();
        self.eval_in(phi, &mut env)
    }

    fn eval_in(&mut self, phi: &MuFormula, env: &mut Vec<(Var, Vec<Edge>)>) -> Vec<Edge> {
        let n = self.nodes.len();
        match phi {
            MuFormula::Top => vec![Edge::TRUE; n],
            MuFormula::Bot => vec![Edge::FALSE; n],
            MuFormula::Concept(c) => self.concepts.get(c).cloned().unwrap_or_else(|| vec![Edge::FALSE; n]),
            MuFormula::NotConcept(c) => self.eval_in(&MuFormula::Concept(c.clone()), env).into_iter().map(|e| !e).collect(),
            MuFormula::Nominal(a) => self.nodes.iter().map(|b| Aig::constant(a == b)).collect(),
            MuFormula::NotNominal(a) => self.nodes.iter().map(|b| Aig::constant(a != b)).collect(),
            MuFormula::Var(x) => env.iter().rev().find(|(y, _)| y == x).map(|(_, v)| v.clone()).expect("closed formula"),
            MuFormula::And(l, r) => {
                let (a, b) = (self.eval_in(l, env), self.eval_in(r, env));
                a.into_iter().zip(b).map(|(x, y)| self.aig.and(x, y)).collect()
            }
            MuFormula::Or(l, r) => {
                let (a, b) = (self.eval_in(l, env), self.eval_in(r, env));
                a.into_iter().zip(b).map(|(x, y)| self.aig.or(x, y)).collect()
            }
            MuFormula::Diamond(role, b) => {
                let inner = self.eval_in(b, env);
                self.modal(role, &inner, true)
            }
            MuFormula::Box(role, b) => {
                let inner = self.eval_in(b, env);
                self.modal(role, &inner, false)
            }
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                let free: Vec<Vec<Edge>> = phi
                    .free_vars()
                    .iter()
                    .map(|y| env.iter().rev().find(|(z, _)| z == y).map(|(_, v)| v.clone()).expect("closed formula"))
                    .collect();
                let key = (phi as *const MuFormula, free);
                if let Some(v) = self.memo.get(&key) {
                    return v.clone();
                }
                let least = matches!(phi, MuFormula::Mu(..));
                let mut cur = vec![Aig::constant(!least); n];
                // A monotone map on n-bit vectors stabilises within n steps.
                for _ in 0..n {
                    env.push((x.clone(), cur.clone()));
                    let next = self.eval_in(b, env);
                    env.pop();
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                self.memo.insert(key, cur.clone());
                cur
            }
        }
    }

    fn modal(&mut self, role: &Role, inner: &[Edge], diamond: bool) -> Vec<Edge> {
        let n = self.nodes.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Aig::constant(!diamond);
            for (j, &v) in inner.iter().enumerate() {
                let e = self.edge(role, i, j);
                acc = if diamond {
                    let t = self.aig.and(e, v);
                    self.aig.or(acc, t)
                } else {
                    let t = self.aig.or(!e, v);
                    self.aig.and(acc, t)
                };
            }
            out.push(acc);
        }
        out
    }

    /// A graph making `root` true, or `None` if none exists over these nodes.
    /// Nodes left without assertions are labelled with `pad`.
    pub fn solve(&self, root: Edge, pad: &ConceptName) -> Option<DataGraph> {
        let mut inputs = Vec::new();
        let mut atoms = Vec::new();
        for (c, v) in &self.concepts {
            for (i, e) in v.iter().enumerate() {
                inputs.push(*e);
                atoms.push((Some(c.clone()), None, i, i));
            }
        }
        for (r, m) in &self.roles {
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    inputs.push(*e);
                    atoms.push((None, Some(r.clone()), i, j));
                }
            }
        }
        let values = aig::solve(&self.aig, root, &inputs)?;
        let mut g = DataGraph::new();
        for ((c, r, i, j), on) in atoms.into_iter().zip(values) {
            if !on {
                continue;
            }
            match (c, r) {
                (Some(c), _) => {
                    g.add_concept(c, self.nodes[i].clone());
                }
                (_, Some(r)) => {
                    g.add_role(r, self.nodes[i].clone(), self.nodes[j].clone());
                }
                _ => unreachable!(),
            }
        }
        let dom = g.domain();
        for a in &self.nodes {
            if !dom.contains(a) {
                g.add_concept(pad.clone(), a.clone());
            }
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::eval;

    #[test]
    fn satisfiable_formula_yields_a_replaying_graph() {
        let f = MuFormula::parse("mu X . (A | <p> X)").unwrap();
        let nodes: Vec<NodeId> = vec!["0".into(), "1".into()];
        let mut sg = SymbolicGraph::new(nodes, [&ConceptName::new("A")], [&RoleName::new("p")]);
        let v = sg.eval(&f);
        let goal = sg.aig.and(v[0], !v[1]);
        let g = sg.solve(goal, &ConceptName::new("Aux")).unwrap();
        let ext = eval(&f, &g, &Default::default()).unwrap();
        assert!(ext.contains(&NodeId::from("0")) && !ext.contains(&NodeId::from("1")));
    }

    #[test]
    fn infinite_chain_formula_is_unsatisfiable_on_small_domains() {
        let f = MuFormula::parse("nu X . (<r> X & mu Y . [r-] Y)").unwrap();
        // Read with the outer binder scoping over the conjunction, every r-path
        // must be infinite forwards and well-founded backwards.
        for n in 1..=4 {
            let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::from(i.to_string())).collect();
            let mut sg = SymbolicGraph::new(nodes, [], [&RoleName::new("r")]);
            let v = sg.eval(&f);
            let goal = sg.aig.or_all(v);
            assert!(sg.solve(goal, &ConceptName::new("Aux")).is_none());
        }
    }
}
