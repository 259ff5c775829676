//! Bounded document satisfiability, and the formula route that checks a
//! witness.

use wfshacl::analysis::{doc_sat_bounded, validates_via_lambda};
use wfshacl::wf::validate_document;
use wfshacl::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Document::parse("s <- A | some p . !t\nt <- !s | some r . t\ntarget node <0> s\ntarget class B t")?;
    let out = doc_sat_bounded(&d, 3)?;
    match out.witness() {
        Some(g) => {
            println!("witness: {}", g.to_string().trim());
            println!("validates: {}", validate_document(g, &d)?);
            println!("validates via formula: {}", validates_via_lambda(g, &d)?);
        }
        None => println!("no witness up to {} nodes", out.bound),
    }
    Ok(())
}
