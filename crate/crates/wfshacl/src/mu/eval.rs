//! Evaluation of formulas over finite data graphs by fixpoint iteration.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::model::{DataGraph, IndexedGraph, NodeId};

use super::formula::{MuFormula, Var};
use super::MuError;

/// An assignment of node sets to variables.
pub type Valuation = BTreeMap<Var, BTreeSet<NodeId>>;

/// Evaluates formulas on one indexed graph, memoising fixpoint subformulas by
/// the values of their free variables.
pub struct MuEvaluator<'g, 'f> {
    ig: &'g IndexedGraph,
    _formulas: std::marker::PhantomData<&'f MuFormula>,
    free: HashMap<*const MuFormula, Vec<Var>>,
    memo: HashMap<(*const MuFormula, Vec<FixedBitSet>), FixedBitSet>,
}

impl<'g, 'f> MuEvaluator<'g, 'f> {
    /// An evaluator over `ig`.
    pub fn new(ig: &'g IndexedGraph) -> Self {
        MuEvaluator { ig, _formulas: std::marker::PhantomData, free: HashMap::new(), memo: HashMap::new() }
    }

    /// `‖Φ‖` under the dense valuation `env`. Formulas are borrowed for the
    /// evaluator's lifetime because memo entries are keyed by their addresses.
    pub fn eval(&mut self, phi: &'f MuFormula, env: &mut Vec<(Var, FixedBitSet)>) -> Result<FixedBitSet, MuError> {
        let ig = self.ig;
        Ok(match phi {
            MuFormula::Top => ig.full_set(),
            MuFormula::Bot => ig.empty_set(),
            MuFormula::Concept(c) => ig.concept(c),
            MuFormula::NotConcept(c) => complement(ig, &ig.concept(c)),
            MuFormula::Nominal(a) => ig.from_nodes(std::iter::once(a)),
            MuFormula::NotNominal(a) => complement(ig, &ig.from_nodes(std::iter::once(a))),
            MuFormula::Var(x) => match env.iter().rev().find(|(y, _)| y == x) {
                Some((_, s)) => s.clone(),
                None => return Err(MuError::UnboundVariable(x.clone())),
            },
            MuFormula::And(l, r) => {
                let mut a = self.eval(l, env)?;
                if a.is_clear() {
                    return Ok(a);
                }
                a.intersect_with(&self.eval(r, env)?);
                a
            }
            MuFormula::Or(l, r) => {
                let mut a = self.eval(l, env)?;
                a.union_with(&self.eval(r, env)?);
                a
            }
            MuFormula::Diamond(role, b) => {
                let inner = self.eval(b, env)?;
                ig.exists(role, &inner)
            }
            MuFormula::Box(role, b) => {
                let inner = self.eval(b, env)?;
                ig.forall(role, &inner)
            }
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                let key = (phi as *const MuFormula, self.free_values(phi, env)?);
                if let Some(v) = self.memo.get(&key) {
                    return Ok(v.clone());
                }
                let least = matches!(phi, MuFormula::Mu(..));
                let mut cur = if least { ig.empty_set() } else { ig.full_set() };
                loop {
                    env.push((x.clone(), cur.clone()));
                    let next = self.eval(b, env);
                    env.pop();
                    let next = next?;
                    if next == cur {
                        break;
                    }
                    cur = next;
                }
                self.memo.insert(key, cur.clone());
                cur
            }
        })
    }

    fn free_values(&mut self, phi: &'f MuFormula, env: &[(Var, FixedBitSet)]) -> Result<Vec<FixedBitSet>, MuError> {
        let vars = self.free.entry(phi as *const MuFormula).or_insert_with(|| phi.free_vars().into_iter().collect());
        vars.iter()
            .map(|x| match env.iter().rev().find(|(y, _)| y == x) {
                Some((_, s)) => Ok(s.clone()),
                None => Err(MuError::UnboundVariable(x.clone())),
            })
            .collect()
    }

    /// The `α`-th approximant of the fixpoint formula `σX.Φ`.
    pub fn approximant(&mut self, phi: &'f MuFormula, alpha: usize, env: &mut Vec<(Var, FixedBitSet)>) -> Result<FixedBitSet, MuError> {
        let (x, body, least) = match phi {
            MuFormula::Mu(x, b) => (x, b, true),
            MuFormula::Nu(x, b) => (x, b, false),
            _ => return Err(MuError::NotAFixpoint),
        };
        let mut cur = if least { self.ig.empty_set() } else { self.ig.full_set() };
        for _ in 0..alpha {
            env.push((x.clone(), cur.clone()));
            let next = self.eval(body, env);
            env.pop();
            let next = next?;
            if next == cur {
                break;
            }
            cur = next;
        }
        Ok(cur)
    }
}

fn complement(ig: &IndexedGraph, s: &FixedBitSet) -> FixedBitSet {
    let mut x = ig.full_set();
    x.difference_with(s);
    x
}

fn dense_env(ig: &IndexedGraph, phi: &MuFormula, v: &Valuation) -> Result<Vec<(Var, FixedBitSet)>, MuError> {
    if let Some(x) = phi.free_vars().into_iter().find(|x| !v.contains_key(x)) {
        return Err(MuError::UnboundVariable(x));
    }
    Ok(v.iter().map(|(x, s)| (x.clone(), ig.from_nodes(s))).collect())
}

/// `‖Φ‖^G_V`.
pub fn eval(phi: &MuFormula, g: &DataGraph, v: &Valuation) -> Result<BTreeSet<NodeId>, MuError> {
    let ig = g.index();
    eval_indexed(phi, &ig, v)
}

/// `‖Φ‖^G_V` on a prebuilt index.
pub fn eval_indexed(phi: &MuFormula, ig: &IndexedGraph, v: &Valuation) -> Result<BTreeSet<NodeId>, MuError> {
    let mut env = dense_env(ig, phi, v)?;
    let out = MuEvaluator::new(ig).eval(phi, &mut env)?;
    Ok(ig.to_nodes(&out))
}

/// `‖σ^α X.Φ‖^G_V`: `μ⁰ = ∅`, `ν⁰ = Δ`, `σ^{α+1} = ‖Φ‖` with `X ↦ σ^α`.
pub fn approximant(phi: &MuFormula, alpha: usize, g: &DataGraph, v: &Valuation) -> Result<BTreeSet<NodeId>, MuError> {
    let ig = g.index();
    let mut env = dense_env(&ig, phi, v)?;
    let out = MuEvaluator::new(&ig).approximant(phi, alpha, &mut env)?;
    Ok(ig.to_nodes(&out))
}
