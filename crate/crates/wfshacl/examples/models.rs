//! Supported models versus the well-founded model on a two-node cycle, plus
//! stratification.

use wfshacl::supported::{enumerate_supported_models, stratify};
use wfshacl::wf::well_founded_model;
use wfshacl::{ConstraintSet, DataGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = DataGraph::parse("p(0,1) p(1,0) r(0,1) r(1,0)")?;
    let c = ConstraintSet::parse("s <- A | some p . !t\nt <- !s | some r . t")?;

    let wf = well_founded_model(&g, &c)?.model;
    println!("well-founded model: {:?}", wf.literals());
    for (i, m) in enumerate_supported_models(&g, &c)?.iter().enumerate() {
        println!("S{}: {}", i + 1, m);
    }
    println!("stratifiable: {}", stratify(&c).is_some());

    let stratified = ConstraintSet::parse("s <- A\nt <- !s & some r . s")?;
    let layers = stratify(&stratified).expect("no negative cycle");
    println!("layers: {:?}", layers.layers);
    Ok(())
}
