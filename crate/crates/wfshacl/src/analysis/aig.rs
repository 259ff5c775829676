//! A hash-consed and-inverter graph with a Tseitin bridge to a SAT solver.

use std::collections::HashMap;

use varisat::{ExtendFormula, Lit, Solver};

/// An AIG edge: `2·node + complemented`. Node 0 is the constant `false`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(u32);

impl Edge {
    /// Constant false.
    pub const FALSE: Edge = Edge(0);
    /// Constant true.
    pub const TRUE: Edge = Edge(1);

    fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn complemented(self) -> bool {
        self.0 & 1 == 1
    }

    /// Whether the edge is a constant.
    pub fn is_const(self) -> bool {
        self.node() == 0
    }
}

impl std::ops::Not for Edge {
    type Output = Edge;
    fn not(self) -> Edge {
        Edge(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Const,
    Input,
    And(Edge, Edge),
}

/// An and-inverter graph with structural hashing.
#[derive(Clone, Debug)]
pub struct Aig {
    nodes: Vec<Node>,
    strash: HashMap<(Edge, Edge), Edge>,
}

impl Default for Aig {
    fn default() -> Self {
        Aig::new()
    }
}

impl Aig {
    /// An AIG holding only the constant node.
    pub fn new() -> Self {
        Aig { nodes: vec![Node::Const], strash: HashMap::new() }
    }

    /// Number of nodes, including the constant.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether only the constant node exists.
    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    /// A fresh primary input.
    pub fn input(&mut self) -> Edge {
        self.nodes.push(Node::Input);
        Edge(((self.nodes.len() - 1) as u32) << 1)
    }

    /// A constant edge.
    pub fn constant(value: bool) -> Edge {
        if value {
            Edge::TRUE
        } else {
            Edge::FALSE
        }
    }

    /// Conjunction with constant folding and hashing.
    pub fn and(&mut self, a: Edge, b: Edge) -> Edge {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a == Edge::FALSE || a == !b {
            return Edge::FALSE;
        }
        if a == Edge::TRUE || a == b {
            return b;
        }
        if let Some(&e) = self.strash.get(&(a, b)) {
            return e;
        }
        self.nodes.push(Node::And(a, b));
        let e = Edge(((self.nodes.len() - 1) as u32) << 1);
        self.strash.insert((a, b), e);
        e
    }

    /// Disjunction.
    pub fn or(&mut self, a: Edge, b: Edge) -> Edge {
        !self.and(!a, !b)
    }

    /// Conjunction of many edges (`true` when empty).
    pub fn and_all(&mut self, items: impl IntoIterator<Item = Edge>) -> Edge {
        items.into_iter().fold(Edge::TRUE, |acc, e| self.and(acc, e))
    }

    /// Disjunction of many edges (`false` when empty).
    pub fn or_all(&mut self, items: impl IntoIterator<Item = Edge>) -> Edge {
        items.into_iter().fold(Edge::FALSE, |acc, e| self.or(acc, e))
    }

    /// Evaluates an edge under an input assignment (indexed by input edge).
    pub fn evaluate(&self, e: Edge, inputs: &HashMap<Edge, bool>) -> bool {
        let mut values = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate().take(e.node() + 1) {
            values[i] = match n {
                Node::Const => false,
                Node::Input => inputs.get(&Edge((i as u32) << 1)).copied().unwrap_or(false),
                Node::And(a, b) => (values[a.node()] ^ a.complemented()) && (values[b.node()] ^ b.complemented()),
            };
        }
        values[e.node()] ^ e.complemented()
    }
}

/// Solves `root = true` and returns the values of the requested inputs, or
/// `None` if unsatisfiable.
pub fn solve(aig: &Aig, root: Edge, inputs: &[Edge]) -> Option<Vec<bool>> {
    if root == Edge::FALSE {
        return None;
    }
    let mut solver = Solver::new();
    let mut vars: HashMap<usize, Lit> = HashMap::new();
    // Inputs and reachable and-nodes get solver variables; the cone is encoded bottom-up.
    let mut stack = vec![root.node()];
    let mut cone = Vec::new();
    while let Some(n) = stack.pop() {
        if n == 0 || vars.contains_key(&n) {
            continue;
        }
        vars.insert(n, solver.new_lit());
        cone.push(n);
        if let Node::And(a, b) = aig.nodes[n] {
            stack.push(a.node());
            stack.push(b.node());
        }
    }
    for &e in inputs {
        vars.entry(e.node()).or_insert_with(|| solver.new_lit());
    }
    let lit = |vars: &HashMap<usize, Lit>, e: Edge| -> Option<Lit> {
        if e.node() == 0 {
            None
        } else {
            let l = vars[&e.node()];
            Some(if e.complemented() { !l } else { l })
        }
    };
    let true_lit = solver.new_lit();
    solver.add_clause(&[true_lit]);
    let as_lit = |vars: &HashMap<usize, Lit>, e: Edge| -> Lit {
        match lit(vars, e) {
            Some(l) => l,
            None if e == Edge::TRUE => true_lit,
            None => !true_lit,
        }
    };
    for &n in &cone {
        if let Node::And(a, b) = aig.nodes[n] {
            let x = vars[&n];
            let (la, lb) = (as_lit(&vars, a), as_lit(&vars, b));
            solver.add_clause(&[!x, la]);
            solver.add_clause(&[!x, lb]);
            solver.add_clause(&[x, !la, !lb]);
        }
    }
    solver.add_clause(&[as_lit(&vars, root)]);
    if !solver.solve().expect("in-memory solving cannot fail") {
        return None;
    }
    let model: std::collections::HashSet<Lit> = solver.model().expect("satisfiable").into_iter().collect();
    Some(inputs.iter().map(|e| model.contains(&vars[&e.node()])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_hashing() {
        let mut g = Aig::new();
        let a = g.input();
        let b = g.input();
        assert_eq!(g.and(a, !a), Edge::FALSE);
        assert_eq!(g.and(a, Edge::TRUE), a);
        let ab = g.and(a, b);
        assert_eq!(g.and(b, a), ab);
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn solving_matches_evaluation() {
        let mut g = Aig::new();
        let a = g.input();
        let b = g.input();
        let x = g.or(a, b);
        let y = g.and(x, !a);
        let m = solve(&g, y, &[a, b]).unwrap();
        assert_eq!(m, vec![false, true]);
        let inputs = HashMap::from([(a, m[0]), (b, m[1])]);
        assert!(g.evaluate(y, &inputs));
        let z = g.and(y, a);
        assert!(solve(&g, z, &[a, b]).is_none());
        assert_eq!(solve(&g, Edge::TRUE, &[a]).map(|m| m.len()), Some(1));
    }
}
