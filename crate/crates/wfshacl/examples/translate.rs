//! Translating shapes into the mu-calculus, cleaning, and the target
//! formulas for documents.

use wfshacl::mu::{eval, Valuation};
use wfshacl::translate::{fresh_role, lambda, theta, translate, translate_clean};
use wfshacl::{DataGraph, Document};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Document::parse("s <- A | some p . !t\nt <- !s | some r . t\ntarget node <0> s")?;
    let s = "s".into();

    println!("raw:   {}", translate(&d.constraints, &s)?);
    let clean = translate_clean(&d.constraints, &s)?;
    println!("clean: {clean}");

    let g = DataGraph::parse("p(0,1) p(1,2) r(0,0) r(1,1) r(2,2) A(2)")?;
    println!("extension: {:?}", eval(&clean, &g, &Valuation::new())?);

    println!("theta:  {}", theta(&d)?);
    let p = fresh_role(&[&d]);
    println!("lambda: {}", lambda(&d, &p)?);

    let infinity = Document::parse("s <- !s1\ns1 <- all r . s1 | !s2\ns2 <- all r- . s2")?;
    println!("infinity axiom: {}", translate_clean(&infinity.constraints, &s)?);
    Ok(())
}
