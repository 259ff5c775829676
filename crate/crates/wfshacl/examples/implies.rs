//! Bounded implication between documents: counterexample search.

use wfshacl::analysis::{counterexample_via_formula, implies_bounded};
use wfshacl::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a_or_b = Document::parse("s <- A | B\ntarget node <a> s")?;
    let a_only = Document::parse("s <- A\ntarget node <a> s")?;

    let out = implies_bounded(&a_or_b, &a_only, 3)?;
    let g = out.witness().expect("A or B does not imply A");
    println!("counterexample: {}", g.to_string().trim());
    println!("confirmed by the implication formula: {}", counterexample_via_formula(g, &a_or_b, &a_only)?);

    let out = implies_bounded(&a_only, &a_or_b, 3)?;
    println!("A implies A or B: {:?}", out.verdict);
    Ok(())
}
