//! Well-founded validation of a recursive constraint set, with the iteration
//! trace and target checking.

use wfshacl::wf::{validate_document, well_founded_model};
use wfshacl::{DataGraph, Document};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = DataGraph::parse("p(0,1) p(1,2) p(2,3) p(3,4) p(4,5) p(5,6) r(0,0) r(1,1) r(2,2) r(3,3) r(4,4) r(5,5) r(6,6) A(6)")?;
    let d = Document::parse("s <- A | some p . !t\nt <- !s | some r . t\ntarget node <0> s")?;

    let wf = well_founded_model(&g, &d.constraints)?;
    for line in wf.trace.lines() {
        println!("{line}");
    }
    println!("s holds at {:?}", wf.model.extension(&"s".into()));
    println!("document validates: {}", validate_document(&g, &d)?);
    Ok(())
}
