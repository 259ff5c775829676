//! Evaluating mu-calculus formulas, their approximants and duals on a graph.

use wfshacl::mu::{approximant, eval, MuFormula, Valuation};
use wfshacl::DataGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = DataGraph::parse("p(0,1) p(1,2) p(2,3) A(3) B(0)")?;
    let v = Valuation::new();

    let reach = MuFormula::parse("mu X . (A | <p> X)")?;
    for alpha in 0..=4 {
        println!("approximant {alpha}: {:?}", approximant(&reach, alpha, &g, &v)?);
    }
    println!("fixpoint:      {:?}", eval(&reach, &g, &v)?);

    let dual = reach.dualize()?;
    println!("dual {dual}: {:?}", eval(&dual, &g, &v)?);

    let nominal = MuFormula::parse("<p> @2")?;
    println!("{nominal}: {:?}", eval(&nominal, &g, &v)?);
    Ok(())
}
