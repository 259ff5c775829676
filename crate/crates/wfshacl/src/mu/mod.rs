//! The full hybrid μ-calculus: formulas, text syntax, evaluation, cleaning and
//! dualisation.

mod eval;
mod formula;
mod text;

pub use eval::{approximant, eval, eval_indexed, MuEvaluator, Valuation};
pub use formula::{MuFormula, Var};
pub use text::{parse_formula, parse_formula_with_free};

use thiserror::Error;

/// Errors of formula evaluation and manipulation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MuError {
    /// A free variable has no value in the valuation.
    #[error("variable `{0}` is not bound by the valuation")]
    UnboundVariable(Var),
    /// The operation requires a closed formula.
    #[error("formula has free variable `{0}`")]
    FreeVariable(Var),
    /// Approximants exist only for fixpoint formulas.
    #[error("approximants are defined only for fixpoint formulas")]
    NotAFixpoint,
}
