//! Bounded shape satisfiability with both search strategies.

use wfshacl::analysis::{shape_sat_bounded, shape_sat_with, SearchOptions, Strategy, Verdict};
use wfshacl::ConstraintSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t")?;
    let s = "s".into();
    let out = shape_sat_bounded(&c, &s, 3)?;
    println!("symbolic: {:?} after {} graphs", out.verdict, out.graphs_examined);

    let out = shape_sat_with(&c, &s, &SearchOptions::new(3).with_strategy(Strategy::Enumerate))?;
    if let Some(g) = out.witness() {
        println!("enumerate: witness {}", g.to_string().trim());
    }

    // Only infinite graphs satisfy this shape, so every bound is inconclusive.
    let infinity = ConstraintSet::parse("s <- !s1\ns1 <- all r . s1 | !s2\ns2 <- all r- . s2")?;
    let out = shape_sat_bounded(&infinity, &s, 5)?;
    assert_eq!(out.verdict, Verdict::NoWitnessUpTo(5));
    println!("infinity axiom: no model up to {} nodes", out.bound);
    Ok(())
}
